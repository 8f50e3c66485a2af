import pytest

from .config import Config


def small_config(**sections) -> Config:
    base = dict(
        space=dict(kind="ball", dims=1, radius=1.0),
        model=dict(family="logistic", theta0=[1.0], r_lo=0.2, r_hi=3.0),
        data=dict(n=10, theta_true=[1.0]),
        opt=dict(max_iters=20),
        experiment=dict(
            replicates=5,
            rho_grid=[0.05, 0.1, 0.2],
            true_risk_samples=2000,
            reference_samples=500,
            threads=2,
            n_grid=[10, 20],
            rho_n_grid=[0.0, 0.05, 0.2],
            bootstrap=20,
            shift_points=3,
        ),
    )
    for name, values in sections.items():
        base[name] = {**base.get(name, {}), **values}
    return Config.model_validate(base)


@pytest.fixture
def logistic_config():
    return small_config()


@pytest.fixture
def constant_config():
    return small_config(model=dict(family="constant", theta0=[0.3], bounds="point"))
