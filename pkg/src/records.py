from pathlib import Path

from pydantic import BaseModel, ConfigDict


class Serializable(BaseModel):
    """Base for result records: JSON dumps and CSV rows"""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    def row(self) -> dict:
        return self.model_dump(by_alias=True)

    def write_to(self, folder: Path, name: str) -> Path:
        filepath = Path(folder) / (name + ".json")
        with open(filepath, "wt") as datafile:
            datafile.write(self.model_dump_json(indent=4))
        return filepath


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
