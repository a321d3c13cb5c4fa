import math

import numpy as np
import pytest

from crspectrum.channel import SuLocation
from crspectrum.recommender import (
    AccessRecord,
    ScoreMatrix,
    cf_predict,
    default_threshold,
    final_score,
    final_score_located,
    recommend,
    score_access,
    score_matrix_to_csv,
)


class TestScoreAccess:
    def test_interrupted_after_three(self):
        assert score_access(3, 5) == 3

    def test_immediate_collision(self):
        assert score_access(0, 5) == 0

    def test_uninterrupted(self):
        assert score_access(5, 5) == 5

    def test_over_cap_rejected(self):
        with pytest.raises(ValueError):
            score_access(6, 5)


class TestScoreMatrix:
    def test_append_and_window(self):
        m = ScoreMatrix(n_su=2, m_ch=3)
        m.append(AccessRecord(su=0, channel=1, t=5, rating=3))
        m.append(AccessRecord(su=1, channel=1, t=9, rating=2))
        m.append(AccessRecord(su=0, channel=2, t=9, rating=4))
        # window [now-L, now) = [4, 14): both channel-1 records inside
        recs = m.window_records(channel=1, now=14, window=10)
        assert [r.rating for r in recs] == [3, 2]
        # shrink the window so only the later record stays
        recs = m.window_records(channel=1, now=10, window=2)
        assert [r.rating for r in recs] == [2]

    def test_time_order_enforced(self):
        m = ScoreMatrix(n_su=1, m_ch=1)
        m.append(AccessRecord(su=0, channel=0, t=5, rating=1))
        with pytest.raises(ValueError):
            m.append(AccessRecord(su=0, channel=0, t=4, rating=1))

    def test_index_range(self):
        m = ScoreMatrix(n_su=1, m_ch=1)
        with pytest.raises(ValueError):
            m.append(AccessRecord(su=1, channel=0, t=0, rating=0))

    def test_negative_rating_rejected(self):
        with pytest.raises(ValueError):
            AccessRecord(su=0, channel=0, t=0, rating=-1)


class TestCfPredict:
    def test_mean(self):
        ratings = np.array([[np.nan, np.nan], [2.0, 1.0], [4.0, 1.0]])
        assert cf_predict(0, 0, [1, 2], ratings, mode="mean") == 3.0

    def test_weighted_equal_sims_reduces_to_mean(self):
        ratings = np.array([[np.nan], [2.0], [4.0]])
        got = cf_predict(0, 0, [1, 2], ratings, similarities=[1.0, 1.0], mode="weighted")
        assert got == 3.0
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            r = rng.uniform(0, 5, size=(n + 1, 3))
            sims = [0.7] * n
            w = cf_predict(0, 1, list(range(1, n + 1)), r, similarities=sims, mode="weighted")
            m = cf_predict(0, 1, list(range(1, n + 1)), r, mode="mean")
            assert w == pytest.approx(m, abs=1e-12)

    def test_centered_hand_case(self):
        # neighbor rated item 5 with personal mean 4; target mean 2 -> 3
        ratings = np.array(
            [
                [2.0, 2.0, np.nan],
                [5.0, 4.0, 3.0],
            ]
        )
        got = cf_predict(0, 0, [1], ratings, similarities=[1.0], mode="centered")
        assert got == pytest.approx(3.0, abs=1e-12)

    def test_empty_neighbors(self):
        with pytest.raises(ValueError):
            cf_predict(0, 0, [], np.zeros((2, 2)), mode="mean")

    def test_zero_similarity_mass(self):
        ratings = np.array([[1.0], [2.0]])
        with pytest.raises(ValueError):
            cf_predict(0, 0, [1], ratings, similarities=[0.0], mode="weighted")

    def test_unrated_neighbor(self):
        ratings = np.array([[1.0], [np.nan]])
        with pytest.raises(ValueError):
            cf_predict(0, 0, [1], ratings, mode="mean")


def _matrix_with(ratings_at):
    """ratings_at: list of (t, su, channel, rating)."""
    n_su = max(r[1] for r in ratings_at) + 1
    m_ch = max(r[2] for r in ratings_at) + 1
    m = ScoreMatrix(n_su=n_su, m_ch=m_ch)
    for t, su, ch, rating in sorted(ratings_at):
        m.append(AccessRecord(su=su, channel=ch, t=t, rating=rating))
    return m


class TestFinalScore:
    def test_mean_of_window(self):
        m = _matrix_with([(1, 0, 0, 3), (2, 1, 0, 2), (3, 0, 0, 4)])
        assert final_score(m, 0, now=4, window=10) == 3.0

    def test_empty_window_undefined(self):
        m = _matrix_with([(1, 0, 0, 3)])
        assert final_score(m, 0, now=20, window=5) is None

    def test_single_record(self):
        m = _matrix_with([(7, 0, 1, 5)])
        assert final_score(m, 1, now=8, window=3) == 5.0

    def test_uniform_ratings_score_exactly(self):
        m = _matrix_with([(t, 0, 0, 4) for t in range(10)])
        assert final_score(m, 0, now=10, window=10) == 4.0


class TestFinalScoreLocated:
    def test_zero_distance_matches_plain(self):
        m = _matrix_with([(1, 0, 0, 4)])
        locs = [SuLocation(3.0, 3.0, 5.0), SuLocation(3.0, 3.0, 5.0)]
        got = final_score_located(m, 0, target=1, locations=locs, now=2, window=5)
        assert got == pytest.approx(4.0, abs=1e-12)

    def test_log_two_distance_halves(self):
        m = _matrix_with([(1, 0, 0, 4)])
        locs = [SuLocation(0.0, 0.0, 5.0), SuLocation(math.log(2), 0.0, 5.0)]
        got = final_score_located(m, 0, target=1, locations=locs, now=2, window=5)
        assert got == pytest.approx(2.0, abs=1e-12)

    def test_far_records_vanish(self):
        m = _matrix_with([(1, 0, 0, 5)])
        locs = [SuLocation(0.0, 0.0, 5.0), SuLocation(60.0, 0.0, 5.0)]
        got = final_score_located(m, 0, target=1, locations=locs, now=2, window=5)
        assert 0.0 < got < 1e-20

    def test_never_exceeds_plain_score(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n_rec = int(rng.integers(1, 8))
            recs = [
                (int(t), int(rng.integers(0, 3)), 0, int(rng.integers(0, 6)))
                for t, _ in zip(sorted(rng.integers(0, 10, size=n_rec)), range(n_rec))
            ]
            m = _matrix_with(recs + [(0, 3, 1, 0)])  # pad user/channel counts
            locs = [
                SuLocation(float(x), float(y), 5.0)
                for x, y in rng.uniform(0, 10, size=(4, 2))
            ]
            plain = final_score(m, 0, now=11, window=20)
            located = final_score_located(m, 0, 3, locs, now=11, window=20)
            if plain is None:
                assert located is None
            else:
                assert located <= plain + 1e-12


class TestRecommend:
    def test_filter_and_sort(self):
        lst = recommend([4.0, 1.0, 3.0], th=2.0)
        assert lst.channels == [0, 2]
        assert lst.entries == [(0, 4.0), (2, 3.0)]

    def test_all_undefined(self):
        lst = recommend([None, None], th=0.0)
        assert lst.entries == []

    def test_tie_breaks_by_index(self):
        lst = recommend([4.0, 4.0], th=1.0)
        assert lst.channels == [0, 1]

    def test_strictly_above_threshold(self):
        lst = recommend([2.0, 3.0], th=2.0)
        assert lst.channels == [1]

    def test_default_threshold(self):
        assert default_threshold([4.0, None, 6.0]) == 3.0
        assert default_threshold([None, None]) is None


class TestCsvExport:
    def test_format(self):
        m = _matrix_with([(1, 0, 0, 3), (2, 1, 1, 0)])
        text = score_matrix_to_csv(m)
        assert text == "t,su,channel,rating\n1,0,0,3\n2,1,1,0\n"
