from .config import CONFIG_FILE, Config, DataGenerator, read_config, write_template
from .coverage import CoverageReport, CoverageRow, run_coverage
from .datagen import Setting, build_setting, draw, generate_dataset, reference_sample
from .reports import coverage_table, frame, wilson_interval, write_csv
from .runner import Failure, ReplicateRunner, pretty_go
from .sandwich import SandwichReport, SandwichRow, run_sandwich
from .scaling import ScalingFit, ScalingReport, ScalingRow, run_scaling
from .shift import ShiftKind, ShiftReport, ShiftRow, run_shift

__all__ = [
    "CONFIG_FILE",
    "Config",
    "CoverageReport",
    "CoverageRow",
    "DataGenerator",
    "Failure",
    "ReplicateRunner",
    "SandwichReport",
    "SandwichRow",
    "ScalingFit",
    "ScalingReport",
    "ScalingRow",
    "Setting",
    "ShiftKind",
    "ShiftReport",
    "ShiftRow",
    "build_setting",
    "coverage_table",
    "draw",
    "frame",
    "generate_dataset",
    "pretty_go",
    "read_config",
    "reference_sample",
    "run_coverage",
    "run_sandwich",
    "run_scaling",
    "run_shift",
    "wilson_interval",
    "write_csv",
    "write_template",
]
