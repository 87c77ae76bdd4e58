import pytest

from clifford_normalisers.errors import InputError
from clifford_normalisers.settings import Settings
from clifford_normalisers.utils.cyclotomic import get_conductor_cap, set_conductor_cap


def test_defaults():
    settings = Settings()
    assert settings.max_order == 10_000
    assert settings.full_verify_limit == 200
    assert settings.odd_dihedral == [3, 5, 7]
    assert settings.gm_values == [1, 2, 3, 4]
    assert settings.output_format == "human"


def test_environment_overrides():
    settings = Settings.from_env(
        environ={
            "CLIFFNORM_MAX_ORDER": "64",
            "CLIFFNORM_NUMERIC_TOL": "1e-7",
            "CLIFFNORM_GM_VALUES": "1, 2",
            "CLIFFNORM_OUTPUT_FORMAT": "structured",
            "UNRELATED": "x",
        }
    )
    assert settings.max_order == 64
    assert settings.numeric_tol == pytest.approx(1e-7)
    assert settings.gm_values == [1, 2]
    assert settings.output_format == "structured"


def test_explicit_overrides_win_and_none_is_ignored():
    settings = Settings.from_env(environ={"CLIFFNORM_SEED": "5"}, seed=9, max_order=None)
    assert settings.seed == 9
    assert settings.max_order == 10_000


def test_custom_prefix():
    settings = Settings.from_env(prefix="TEST_", environ={"TEST_WORKERS": "3", "CLIFFNORM_WORKERS": "8"})
    assert settings.workers == 3


@pytest.mark.parametrize(
    "environ",
    [
        {"CLIFFNORM_MAX_ORDER": "0"},
        {"CLIFFNORM_MAX_ORDER": "many"},
        {"CLIFFNORM_NUMERIC_TOL": "-1"},
        {"CLIFFNORM_OUTPUT_FORMAT": "xml"},
        {"CLIFFNORM_ODD_DIHEDRAL": "3,five"},
    ],
)
def test_invalid_values_raise_input_error(environ):
    with pytest.raises(InputError):
        Settings.from_env(environ=environ)


def test_apply_sets_conductor_cap():
    previous = get_conductor_cap()
    try:
        Settings(conductor_cap=240).apply()
        assert get_conductor_cap() == 240
    finally:
        set_conductor_cap(previous)
