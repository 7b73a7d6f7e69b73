import pytest

from prompttts.corpus import BuildConfig, build_dataset
from prompttts.textfront import Lexicon, Vocabulary
from prompttts.training import TrainConfig, train_baseline, train_prompttts


@pytest.fixture(scope="session")
def vocab():
    return Vocabulary.load()


@pytest.fixture(scope="session")
def lexicon():
    return Lexicon.load()


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """Small but balanced corpus shared by unit tests (not the acceptance run)."""
    root = tmp_path_factory.mktemp("tiny") / "corpus"
    manifest = build_dataset(BuildConfig(train_size=48, test_size=12, seed=11), root)
    return manifest


def micro_config(tiny_corpus, run_dir, **overrides) -> TrainConfig:
    base = dict(corpus_dir=str(tiny_corpus.root), run_dir=str(run_dir),
                steps=30, stage1_steps=30, batch_size=4, warmup=10,
                checkpoint_every=20, seed=1)
    base.update(overrides)
    return TrainConfig(**base)


@pytest.fixture(scope="session")
def micro_run(tiny_corpus, tmp_path_factory):
    """A briefly-trained model for interface tests (quality is irrelevant)."""
    run_dir = tmp_path_factory.mktemp("runs") / "micro"
    return train_prompttts(micro_config(tiny_corpus, run_dir))


@pytest.fixture(scope="session")
def micro_baseline(tiny_corpus, tmp_path_factory):
    run_dir = tmp_path_factory.mktemp("runs") / "baseline"
    return train_baseline(micro_config(tiny_corpus, run_dir, steps=10, stage1_steps=10))
