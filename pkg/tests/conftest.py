import pytest

from psytrain.cases.pipeline import CasePipeline
from psytrain.gateway import Gateway, ProviderConfig, load_script
from psytrain.kb import default_data_dir, load_kb


@pytest.fixture(scope="session")
def kb():
    return load_kb()


@pytest.fixture(scope="session")
def script_path():
    return str(default_data_dir() / "scripts" / "default.json")


@pytest.fixture(scope="session")
def provider(script_path):
    return load_script(script_path)


@pytest.fixture(scope="session")
def gateway(provider):
    return Gateway(provider, ProviderConfig())


@pytest.fixture
def pipeline(gateway, kb):
    return CasePipeline(gateway, kb, seed=0)


@pytest.fixture
def mdd_case(pipeline):
    task = pipeline.start_generation("mdd", 2)
    pipeline.run_to_completion(task)
    assert task.draft is not None
    return task.draft
