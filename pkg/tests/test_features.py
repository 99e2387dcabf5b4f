import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lexidrift.corpus import Document
from lexidrift.features import (
    PRUNED_FEATURES, RAW_FEATURES, FeatureMatrix, FeatureVector, ari,
    assemble_matrix, brunet, correlation_matrix, extract_all, flesch, honore,
    pos_features, prune_and_standardize, read_matrix_csv, sichel,
    write_matrix_csv)
from lexidrift.postag import TaggedDocument
from lexidrift.textnorm import TokenizedDocument


def make_doc(text, doc_id="1984-01-01_doc"):
    return Document(id=doc_id, date=dt.date(1984, 1, 1), title="t", raw_text=text)


class TestPosFeatures:
    def test_ratio_and_rates(self):
        tags = ["PRON"] * 20 + ["NOUN"] * 40 + ["OTHER"] * 40
        tagged = TaggedDocument(doc_id="d", tags=tags)
        tokens = [f"w{i}" for i in range(100)]
        vals = pos_features(tagged, tokens, frozenset())
        assert vals["pronoun_noun_ratio"] == pytest.approx(0.5)
        assert vals["pronoun_freq_rate"] == pytest.approx(20.0)
        assert vals["noun_freq_rate"] == pytest.approx(40.0)
        assert vals["verb_freq_rate"] == 0.0  # zero verbs, below threshold

    def test_below_threshold_rate_zeroed(self):
        tags = ["PRON"] * 5 + ["NOUN"] * 95
        vals = pos_features(TaggedDocument(doc_id="d", tags=tags),
                            [f"w{i}" for i in range(100)], frozenset())
        assert vals["n_pronouns"] == 5.0
        assert vals["pronoun_freq_rate"] == 0.0

    def test_noun_denominator_floored(self):
        tags = ["PRON"] * 3 + ["OTHER"] * 7
        vals = pos_features(TaggedDocument(doc_id="d", tags=tags),
                            list("abcdefghij"), frozenset())
        assert vals["pronoun_noun_ratio"] == pytest.approx(3.0)

    def test_word_freq_rates_stopword_handling(self):
        # 'the' is stop (12x); 'dog' 12x; 'cat' 6x -> below type threshold
        tokens = ["the"] * 12 + ["dog"] * 12 + ["cat"] * 6
        tags = ["OTHER"] * 12 + ["NOUN"] * 18
        vals = pos_features(TaggedDocument(doc_id="d", tags=tags), tokens,
                            frozenset({"the"}))
        assert vals["word_freq_rate"] == pytest.approx(100.0 * 12 / 18)
        assert vals["word_freq_rate_with_stop"] == pytest.approx(100.0 * 24 / 30)

    def test_all_stopwords_rate_is_zero(self):
        tokens = ["the"] * 12
        vals = pos_features(TaggedDocument(doc_id="d", tags=["OTHER"] * 12),
                            tokens, frozenset({"the"}))
        assert vals["word_freq_rate"] == 0.0

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            pos_features(TaggedDocument(doc_id="d", tags=[]), [], frozenset())


class TestRichness:
    def test_honore_spot(self):
        assert honore(["a", "b", "a", "c"]) == pytest.approx(415.888, abs=1e-3)

    def test_honore_all_hapax_clamped(self):
        assert honore(["a", "b", "c"]) == pytest.approx(100 * math.log(3) / 1e-3)

    def test_honore_no_hapax(self):
        assert honore(["a", "a", "a", "a"]) == pytest.approx(138.629, abs=1e-3)

    def test_sichel_spot(self):
        assert sichel(["a", "a", "b", "c", "c", "c"]) == pytest.approx(1 / 3)

    def test_sichel_all_hapax(self):
        assert sichel(["a", "b", "c"]) == 0.0

    def test_sichel_all_dislegomena(self):
        assert sichel(["a", "a", "b", "b"]) == 1.0

    def test_brunet_spot(self):
        assert brunet(["a", "b", "a", "c"]) == pytest.approx(3.1786, abs=1e-3)

    def test_brunet_single_token(self):
        assert brunet(["a"]) == pytest.approx(1.0)

    def test_brunet_hundred_hapaxes(self):
        tokens = [f"w{i}" for i in range(100)]
        assert brunet(tokens) == pytest.approx(100 ** (100 ** -0.165), rel=1e-12)


class TestReadability:
    def test_ari_cat_mat(self):
        from lexidrift.textnorm import clean, segment
        doc = segment(clean("The cat sat on the mat."))
        assert ari(doc) == pytest.approx(-5.085, abs=1e-3)

    def test_ari_formula(self):
        doc = TokenizedDocument(doc_id="d", sentences=[(0, 20)],
                                tokens=["x"] * 20, char_count=100, syllable_count=20)
        assert ari(doc) == pytest.approx(4.71 * 5 + 10 - 21.43)

    def test_ari_empty_rejected(self):
        with pytest.raises(ValueError):
            ari(TokenizedDocument(doc_id="d"))

    def test_flesch_cat_mat(self):
        from lexidrift.textnorm import clean, segment
        doc = segment(clean("The cat sat on the mat."))
        assert flesch(doc) == pytest.approx(116.145, abs=1e-3)

    def test_flesch_formula(self):
        doc = TokenizedDocument(doc_id="d", sentences=[(0, 20)],
                                tokens=["x"] * 20, char_count=100, syllable_count=30)
        assert flesch(doc) == pytest.approx(206.835 - 20.3 - 126.9)

    def test_flesch_empty_rejected(self):
        with pytest.raises(ValueError):
            flesch(TokenizedDocument(doc_id="d"))


class TestExtractAll:
    def test_matches_committed_oracle(self, fixture_document, feature_oracle):
        vec = extract_all(fixture_document)
        for name in RAW_FEATURES:
            assert vec.values[name] == pytest.approx(feature_oracle[name], abs=1e-9), name

    def test_smallest_valid_document(self):
        vec = extract_all(make_doc("hello."))
        assert vec.values["n_pronouns"] == 0.0
        assert vec.values["sichel"] == 0.0
        assert math.isfinite(vec.values["honore"])
        assert vec.values["brunet"] == pytest.approx(1.0)

    def test_identical_documents_identical_vectors(self, fixture_document):
        twin = make_doc(fixture_document.raw_text)
        assert extract_all(fixture_document).values == extract_all(twin).values

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError, match="no tokens"):
            extract_all(make_doc("123 456 <b></b>"))

    def test_scale_coherence_on_doubling(self):
        # tag and type frequencies sit clear of the >=10 threshold crossing
        # zone [5, 9], and V1 == V2 == 0 so sichel survives the frequency
        # doubling (hapaxes would otherwise turn into dislegomena)
        text = ("He spoke. " * 12 + "The dog ran. " * 15 + "Quickly she won. " * 3
                + "Freedom grew. " * 4)
        single = extract_all(make_doc(text))
        double = extract_all(make_doc(text + text))
        for name in ("sichel", "pronoun_noun_ratio", "pronoun_freq_rate",
                     "noun_freq_rate", "verb_freq_rate", "adverb_freq_rate",
                     "word_freq_rate", "word_freq_rate_with_stop"):
            assert double.values[name] == pytest.approx(single.values[name]), name
        for name in ("n_pronouns", "n_nouns", "n_verbs", "n_adverbs"):
            assert double.values[name] == pytest.approx(2 * single.values[name]), name
        # honore and brunet change exactly per their formulas (N=86, V=10)
        assert single.values["honore"] == pytest.approx(100 * math.log(86))
        assert double.values["honore"] == pytest.approx(100 * math.log(172))
        assert single.values["brunet"] == pytest.approx(86 ** (10 ** -0.165))
        assert double.values["brunet"] == pytest.approx(172 ** (10 ** -0.165))


class TestCorrelation:
    def test_self_and_negation(self):
        col = np.array([1.0, 2.0, 4.0, 3.0])
        m = FeatureMatrix(doc_ids=list("abcd"), feature_names=["f", "g"],
                          values=np.column_stack([col, -col]))
        corr = correlation_matrix(m)
        assert corr[0, 0] == pytest.approx(1.0)
        assert corr[0, 1] == pytest.approx(-1.0)

    def test_perfectly_linear_columns(self):
        m = FeatureMatrix(doc_ids=list("abcd"), feature_names=["f", "g"],
                          values=np.array([[1, 2], [2, 4], [3, 6], [4, 8.0]]))
        corr = correlation_matrix(m)
        assert corr[0, 1] == pytest.approx(1.0)

    def test_constant_column_defined(self):
        m = FeatureMatrix(doc_ids=list("abc"), feature_names=["f", "g"],
                          values=np.array([[1, 5], [2, 5], [3, 5.0]]))
        corr = correlation_matrix(m)
        assert corr[0, 1] == 0.0 and corr[1, 1] == 1.0
        assert np.all(np.isfinite(corr))

    def test_requires_two_rows(self):
        m = FeatureMatrix(doc_ids=["a"], feature_names=["f"], values=[[1.0]])
        with pytest.raises(ValueError):
            correlation_matrix(m)

    @settings(max_examples=25)
    @given(st.integers(0, 2 ** 31 - 1), st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
    def test_affine_invariance(self, seed, a, b):
        rng = np.random.default_rng(seed)
        values = rng.normal(size=(8, 4))
        m1 = FeatureMatrix(doc_ids=[str(i) for i in range(8)],
                           feature_names=list("wxyz"), values=values)
        m2 = FeatureMatrix(doc_ids=m1.doc_ids, feature_names=m1.feature_names,
                           values=a * values + b)
        assert np.allclose(correlation_matrix(m1), correlation_matrix(m2), atol=1e-9)


class TestPruneStandardize:
    def _matrix(self, n=5, seed=0):
        rng = np.random.default_rng(seed)
        values = rng.normal(size=(n, len(RAW_FEATURES))) * 10 + 3
        return FeatureMatrix(doc_ids=[f"d{i}" for i in range(n)],
                             feature_names=list(RAW_FEATURES), values=values)

    def test_column_selection_and_order(self):
        out = prune_and_standardize(self._matrix())
        assert tuple(out.feature_names) == PRUNED_FEATURES
        assert out.standardized
        assert out.values.shape == (5, 9)

    def test_constant_column_becomes_zeros(self):
        m = self._matrix()
        m.values[:, m.feature_names.index("honore")] = 7.0
        out = prune_and_standardize(m)
        assert np.all(out.column("honore") == 0.0)

    def test_three_point_column(self):
        m = self._matrix(n=3)
        m.values[:, m.feature_names.index("ari")] = [1.0, 2.0, 3.0]
        out = prune_and_standardize(m)
        assert out.column("ari") == pytest.approx([-1.224744871, 0.0, 1.224744871])

    def test_standardized_moments(self):
        out = prune_and_standardize(self._matrix(n=40, seed=3))
        assert np.all(np.abs(out.values.mean(axis=0)) < 1e-9)
        assert np.all(np.abs(out.values.var(axis=0) - 1.0) < 1e-9)


class TestMatrixIo:
    def test_round_trip(self, tmp_path):
        vecs = [FeatureVector(doc_id=f"d{i}",
                              values={n: float(i * 17 + j) / 7 for j, n in enumerate(RAW_FEATURES)})
                for i in range(4)]
        m = assemble_matrix(vecs)
        path = tmp_path / "m.csv"
        write_matrix_csv(m, path)
        back = read_matrix_csv(path)
        assert back.doc_ids == m.doc_ids
        assert back.feature_names == m.feature_names
        assert np.array_equal(back.values, m.values)

    def test_rejects_foreign_csv(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_matrix_csv(path)

    def test_shape_validated(self):
        with pytest.raises(ValueError, match="shape"):
            FeatureMatrix(doc_ids=["a"], feature_names=["f", "g"], values=[[1.0]])
