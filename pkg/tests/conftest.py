import numpy as np
import pytest

from slangchoice.embedding import EmbeddingStore
from slangchoice.lexicon import FilterConfig, ingest


def make_records(spec):
    """Records from compact tuples (word, definition, pos, kind[, extras])."""
    records = []
    for entry in spec:
        word, definition, pos, kind = entry[:4]
        rec = {"word": word, "definition": definition, "pos": pos, "kind": kind}
        if len(entry) > 4:
            rec.update(entry[4])
        records.append(rec)
    return records


def make_lexicon(spec, cfg=None, tag_set=None):
    records = make_records(spec)
    kwargs = {"cfg": cfg or FilterConfig()}
    if tag_set is not None:
        kwargs["tag_set"] = tag_set
    return ingest(records, (), **kwargs)


def make_store(dim, word_vectors=None, sense_vectors=None):
    return EmbeddingStore(
        dim=dim,
        word_vectors={k: np.asarray(v, dtype=float) for k, v in (word_vectors or {}).items()},
        sense_vectors={k: np.asarray(v, dtype=float) for k, v in (sense_vectors or {}).items()},
        source="test",
    ).validate()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
