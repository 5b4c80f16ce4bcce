import pytest

from dentarx import load_graph, load_records, train_safety_classifier
from dentarx.fixtures import fixture_path
from dentarx.safety import synthesize_training_set


@pytest.fixture(scope="session")
def graph():
    return load_graph(fixture_path("kg_mini.jsonl"))


@pytest.fixture(scope="session")
def records(graph):
    return {r.record_id: r for r in load_records(fixture_path("records_mini.jsonl"))}


@pytest.fixture(scope="session")
def classifier(graph):
    examples = synthesize_training_set(graph, 2000, seed=7)
    return train_safety_classifier(examples, graph, seed=7)
