from config.settings import Settings
from config.test_cases import TEST_CASES, support_size


def test_defaults(monkeypatch):
    monkeypatch.delenv("MOMENT_TOLERANCE", raising=False)
    settings = Settings(_env_file=None)
    assert settings.tolerance == 1e-10
    assert settings.default_n_list == [8, 16, 32, 64, 128]
    assert settings.long_running_n == 256


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("MOMENT_TOLERANCE", "1e-8")
    monkeypatch.setenv("MOMENT_DEFAULT_N_LIST", "[4, 8]")
    settings = Settings(_env_file=None)
    assert settings.tolerance == 1e-8
    assert settings.default_n_list == [4, 8]


def test_support_sizes():
    assert support_size(1, 8) == 81
    assert support_size(2, 8) == 91
    assert support_size(4, 512) == (3 * 512 + 2) * (3 * 512 + 4) // 8
    assert sorted(TEST_CASES) == [1, 2, 3, 4, 5]
    assert {case["exact"] for case in TEST_CASES.values()} == {1, 2}
