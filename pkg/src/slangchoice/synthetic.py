"""Built-in toy dataset for hermetic demos, CI, and the acceptance suite.

Word and token names are purely alphabetic so the content-word tokenizer
keeps them intact, and each sense draws from its own disjoint token block
so ingest filters drop nothing and triplet overlap checks stay clean.

Slang sense vectors are a fixed random rotation of a conventional sense
of the true word plus Gaussian noise. The rotation leaves a random
6-of-16-dimensional subspace untouched: distances in that preserved
subspace keep the un-encoded baseline above chance, while the rotated
complement adds distance noise that only the contrastive encoder can
strip away.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import save_vector_file, toy_embedder

DEFAULT_SEED = 7
DEFAULT_DECADES = (1950, 1960, 1970)


def _letters(i, width=2):
    out = []
    for _ in range(width):
        out.append(chr(97 + i % 26))
        i //= 26
    return "".join(reversed(out))


@dataclass
class SyntheticDataset:
    slang_records: list
    conventional_records: list
    vector_rows: list  # (id-or-word, vector), words first
    dim: int
    words: list

    def write_files(self, outdir, header_lines=()):
        outdir.mkdir(parents=True, exist_ok=True)
        paths = {
            "slang": outdir / "slang.jsonl",
            "conventional": outdir / "conventional.jsonl",
            "vectors": outdir / "vectors.txt",
        }
        import json

        for key, records in (("slang", self.slang_records),
                             ("conventional", self.conventional_records)):
            with open(paths[key], "w", encoding="utf-8") as f:
                for line in header_lines:
                    f.write(f"# {line}\n")
                for rec in records:
                    f.write(json.dumps(rec, sort_keys=True) + "\n")
        save_vector_file(paths["vectors"], self.dim, self.vector_rows,
                         header_lines=header_lines)
        return paths


def _rotation(rng, dim, preserved):
    """Orthogonal map: identity on a random `preserved`-dim subspace, Haar rotation on the rest."""
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    r = dim - preserved
    h, _ = np.linalg.qr(rng.standard_normal((r, r)))
    block = np.eye(dim)
    block[preserved:, preserved:] = h
    return q @ block @ q.T


def generate(seed=DEFAULT_SEED, n_words=60, conv_per_word=3, slang_per_word=5,
             dim=16, preserved=6, noise_sigma=0.05, pos_shift=False,
             decades=DEFAULT_DECADES):
    """Build a synthetic lexicon plus matching word/sense vectors.

    With `pos_shift`, words alternate between a noun class whose slang is
    verbal and a verb class whose slang is nominal, giving a deterministic
    POS transition for the syntactic prior.
    """
    rng = np.random.default_rng(seed)
    R = _rotation(rng, dim, preserved)

    plain_tags = ("noun", "verb", "adj")
    words = []
    for i in range(n_words):
        name = "w" + _letters(i)
        if pos_shift:
            name += "a" if i % 2 == 0 else "b"
        words.append(name)

    conventional_records = []
    slang_records = []
    word_rows = []
    sense_rows = []

    for i, w in enumerate(words):
        noun_class = not pos_shift or i % 2 == 0
        conv_vecs = []
        for j in range(conv_per_word):
            vec = toy_embedder(f"{w}.c{j}", dim, seed)
            conv_vecs.append(vec)
            tokens = [f"{w}c{_letters(3 * j + t, 1)}" for t in range(3)]
            tag = ("noun" if noun_class else "verb") if pos_shift else plain_tags[j % 3]
            sense_id = f"{w}.c{j}"
            conventional_records.append({
                "id": sense_id,
                "word": w,
                "definition": " ".join(tokens),
                "pos": tag,
                "kind": "conventional",
            })
            sense_rows.append((sense_id, vec))

        wvec = np.mean(conv_vecs, axis=0) + 0.02 * rng.standard_normal(dim)
        word_rows.append((w, wvec / np.linalg.norm(wvec)))

        for j in range(slang_per_word):
            source = conv_vecs[j % conv_per_word]
            vec = R @ source + noise_sigma * rng.standard_normal(dim)
            tokens = [f"{w}s{_letters(3 * j + t, 1)}" for t in range(3)]
            if pos_shift:
                tag = "verb" if noun_class else "noun"
            else:
                tag = plain_tags[j % conv_per_word % 3]
            sense_id = f"{w}.s{j}"
            record = {
                "id": sense_id,
                "word": w,
                "definition": " ".join(tokens),
                "pos": tag,
                "kind": "slang",
                "example": f"people keep saying {w} whenever {tokens[0]} happens",
            }
            if decades:
                record["decade"] = decades[j % len(decades)]
            slang_records.append(record)
            sense_rows.append((sense_id, vec))

    return SyntheticDataset(
        slang_records=slang_records,
        conventional_records=conventional_records,
        vector_rows=word_rows + sense_rows,
        dim=dim,
        words=words,
    )
