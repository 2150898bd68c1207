from utils.config import DEFAULT_SETTINGS, EngineSettings


def test_defaults():
    assert DEFAULT_SETTINGS.seed == 0
    assert DEFAULT_SETTINGS.trials == 5
    assert DEFAULT_SETTINGS.symbolic_rank_limit == 45
    assert DEFAULT_SETTINGS.jacobi_exhaustive_limit == 30
    assert DEFAULT_SETTINGS.max_bad_samples == 50


def test_from_environment(monkeypatch):
    monkeypatch.setenv('INVARIANTS_SEED', '7')
    monkeypatch.setenv('INVARIANTS_TRIALS', '3')
    monkeypatch.setenv('INVARIANTS_LOG_LEVEL', 'debug')
    settings = EngineSettings.from_environment()
    assert settings.seed == 7
    assert settings.trials == 3
    assert settings.log_level == 'DEBUG'


def test_invalid_environment_values_fall_back(monkeypatch):
    monkeypatch.setenv('INVARIANTS_TRIALS', 'muchos')
    monkeypatch.setenv('INVARIANTS_SAMPLE_BOUND', '0')
    monkeypatch.setenv('INVARIANTS_LOG_LEVEL', 'RUIDOSO')
    settings = EngineSettings.from_environment()
    assert settings.trials == 5
    assert settings.sample_bound == 10 ** 6
    assert settings.log_level == 'WARNING'


def test_overrides_ignore_none():
    settings = EngineSettings().with_overrides(seed=3, trials=None)
    assert settings.seed == 3
    assert settings.trials == 5
