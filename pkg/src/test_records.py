import json

from records import Serializable


class Sample(Serializable):
    name: str
    value: float


def test_write_to_dumps_every_field(tmp_path):
    filepath = Sample(name="fit", value=-0.5).write_to(tmp_path, "sample")
    assert filepath == tmp_path / "sample.json"
    assert json.loads(filepath.read_text()) == {"name": "fit", "value": -0.5}


def test_row_uses_the_field_names():
    assert Sample(name="fit", value=2.0).row() == {"name": "fit", "value": 2.0}
