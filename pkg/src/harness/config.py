import os
from configparser import ConfigParser
from enum import StrEnum, auto
from typing import Annotated

import numpy as np
from pydantic import (
    BaseModel,
    BeforeValidator,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from dual_gen import MonteCarloBudget
from errors import ConfigError, InvalidArgument
from geometry import SampleSpace, SpaceKind
from models import BoundsKind, LossFamily, LossModel, ThetaBounds, make_model
from risk import OptBudget

CONFIG_FILE = os.getenv("WDRO_CONFIG", "wdro.ini")


def _split(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


Floats = Annotated[list[float], BeforeValidator(_split)]
Ints = Annotated[list[int], BeforeValidator(_split)]


class DataGenerator(StrEnum):
    GAUSSIAN_CLIPPED = auto()
    UNIFORM = auto()


class SpaceConfig(BaseModel):
    kind: SpaceKind = SpaceKind.BALL
    dims: int = Field(2, ge=1)
    radius: float = Field(1.0, gt=0)
    y_bound: float = Field(1.0, gt=0)
    lo: Floats = []
    hi: Floats = []
    margin: float | None = None

    def build(self) -> SampleSpace:
        match self.kind:
            case SpaceKind.BALL:
                return SampleSpace.ball(self.radius, self.dims, margin=self.margin)
            case SpaceKind.BOX:
                return SampleSpace.box(self.lo, self.hi, margin=self.margin)
            case SpaceKind.BALL_X_INTERVAL:
                return SampleSpace.ball_x_interval(
                    self.radius, self.y_bound, self.dims, margin=self.margin
                )


class ModelConfig(BaseModel):
    family: LossFamily = LossFamily.LOGISTIC
    theta0: Floats = [1.0, 0.0]
    bounds: BoundsKind = BoundsKind.ANNULUS
    r_lo: float = Field(0.1, gt=0)
    r_hi: float = Field(5.0, gt=0)
    lo: Floats = []
    hi: Floats = []
    anchors: int = Field(20, ge=1)
    bandwidth: float = Field(0.5, gt=0)
    ridge_mu: float = Field(0.01, ge=0)

    def theta_bounds(self) -> ThetaBounds:
        if self.family == LossFamily.CONSTANT:
            return ThetaBounds.point(self.theta0)
        match self.bounds:
            case BoundsKind.ANNULUS:
                return ThetaBounds.annulus(self.r_lo, self.r_hi)
            case BoundsKind.BOX:
                return ThetaBounds.box(self.lo, self.hi)
            case BoundsKind.POINT:
                return ThetaBounds.point(self.theta0)

    def build(self, space: SampleSpace, anchors=None) -> LossModel:
        extra = {}
        if self.family == LossFamily.KERNEL_RIDGE:
            extra = dict(anchors=anchors, bandwidth=self.bandwidth, ridge_mu=self.ridge_mu)
        return make_model(self.family, self.theta0, self.theta_bounds(), space, **extra)


class WdroConfig(BaseModel):
    eps0: float = Field(0.0, ge=0)
    sigma0: float = Field(1.0, gt=0)

    def at(self, rho: float) -> tuple[float, float]:
        """Regularization proportional to the radius"""
        sigma = self.sigma0 * rho if rho > 0 else self.sigma0
        return self.eps0 * rho, sigma


class DataConfig(BaseModel):
    n: int = Field(100, ge=1)
    generator: DataGenerator = DataGenerator.GAUSSIAN_CLIPPED
    theta_true: Floats = [1.0, 0.0]
    noise: float = Field(0.1, ge=0)
    scale: float = Field(0.5, gt=0)


class ExperimentConfig(BaseModel):
    replicates: int = Field(20, ge=1)
    rho_grid: Floats = [0.05, 0.1, 0.2, 0.4]
    true_risk_samples: int = Field(100_000, ge=2)
    seed: int = Field(0, ge=0, lt=2**64)
    threads: int = Field(4, ge=1)
    n_grid: Ints = [125, 500, 2000, 8000]
    rho_n_grid: Floats = [0.0, 0.01, 0.02, 0.05, 0.1, 0.2]
    reference_samples: int = Field(2000, ge=2)
    target_coverage: float = Field(0.9, gt=0, le=1)
    bootstrap: int = Field(200, ge=1)
    shift_points: int = Field(5, ge=2)
    rho_n: float = Field(0.0, ge=0)
    unsmoothed: bool = True

    @field_validator("rho_grid")
    @classmethod
    def positive_ascending(cls, values):
        if not values or values[0] <= 0 or np.any(np.diff(values) <= 0):
            raise ValueError(f"rho_grid must be positive and ascending, got {values}")
        return values

    @field_validator("n_grid")
    @classmethod
    def ascending_sizes(cls, values):
        if not values or values[0] < 2 or np.any(np.diff(values) <= 0):
            raise ValueError(f"n_grid must be ascending sizes >= 2, got {values}")
        return values


class RadiusConfig(BaseModel):
    directions: int = Field(16, ge=1)
    radii: int = Field(4, ge=1)
    samples: int = Field(1000, ge=100)
    eps_grid: Floats = []
    sigma_grid: Floats = []

    @field_validator("sigma_grid")
    @classmethod
    def paired(cls, values, info):
        if len(values) != len(info.data.get("eps_grid", [])):
            raise ValueError("eps_grid and sigma_grid must pair up")
        return values


class Config(BaseModel):
    space: SpaceConfig = SpaceConfig()
    model: ModelConfig = ModelConfig()
    wdro: WdroConfig = WdroConfig()
    mc: MonteCarloBudget = MonteCarloBudget()
    opt: OptBudget = OptBudget()
    data: DataConfig = DataConfig()
    experiment: ExperimentConfig = ExperimentConfig()
    radius: RadiusConfig = RadiusConfig()

    @model_validator(mode="after")
    def buildable(self):
        try:
            self.space.build()
            self.model.theta_bounds()
        except InvalidArgument as err:
            raise ValueError(str(err)) from err
        return self

    @model_validator(mode="after")
    def parameter_sizes(self):
        family = self.model.family
        if family == LossFamily.CONSTANT:
            return self
        if family != LossFamily.LOGISTIC and self.space.kind != SpaceKind.BALL_X_INTERVAL:
            raise ValueError(f"{family} needs a ball_x_interval space, got {self.space.kind}")

        features = self.space.dims if family == LossFamily.LOGISTIC else self.space.dims - 1
        parameters = self.model.anchors if family == LossFamily.KERNEL_RIDGE else features
        if len(self.model.theta0) != parameters:
            raise ValueError(f"{family} needs {parameters} parameters, got {self.model.theta0}")
        if len(self.data.theta_true) != features:
            raise ValueError(f"theta_true needs {features} entries, got {self.data.theta_true}")
        return self

    def with_overrides(self, **overrides) -> "Config":
        """Dotted section.key overrides, None values are skipped"""
        sections = self.model_dump()
        for dotted, value in overrides.items():
            if value is None:
                continue
            section, key = dotted.split(".")
            sections[section][key] = value
        return _validate(sections)


def _validate(sections: dict) -> Config:
    try:
        return Config.model_validate(sections)
    except ValidationError as err:
        raise ConfigError(f"Invalid configuration: {err}") from err


def _ini_value(value) -> str:
    if isinstance(value, list):
        return ", ".join(str(item) for item in value)
    return str(value)


def write_template(filepath: str):
    ini_file = ConfigParser()
    for section, values in Config().model_dump().items():
        ini_file[section] = {
            key: _ini_value(value) for key, value in values.items() if value is not None
        }
    with open(filepath, "wt") as storage:
        ini_file.write(storage)


def read_config(filepath: str | None = None) -> Config:
    filepath = filepath or CONFIG_FILE
    ini_file = ConfigParser()
    if os.path.isfile(filepath):
        ini_file.read(filepath)
    else:
        write_template(filepath)
        raise ConfigError(f"Created template {filepath}, please review and run again.")

    unknown = set(ini_file.sections()) - set(Config.model_fields)
    if unknown:
        raise ConfigError(f"Unknown config sections {sorted(unknown)} in {filepath}")

    sections = dict()
    for section in ini_file.sections():
        sections[section] = dict(ini_file[section])

    return _validate(sections)


if __name__ == "__main__":
    raise RuntimeError("This is a pure module, it cannot be executed.")
