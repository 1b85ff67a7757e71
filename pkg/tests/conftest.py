import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def rs3():
    from resolvent.nichols import nichols_system
    return nichols_system(3)


@pytest.fixture(scope="session")
def rs4():
    from resolvent.nichols import nichols_system
    return nichols_system(4)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("RESOLVENT_CACHE_DIR", str(tmp_path / "cache"))
