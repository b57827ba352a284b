import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pswarm.sociometry import (
    Forward,
    Global,
    InvalidSociometryError,
    Ring,
    Wheel,
    assemble_connectivity,
    build_local_neighbourhood,
    informers,
)


def brute_force_ring(m, k):
    """Adjacency by modular distance, computed without the library."""
    a = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(m):
            d = min((i - j) % m, (j - i) % m)
            a[i, j] = 0 < d <= k
    return a


class TestNeighbourhoods:
    def test_ring(self):
        assert build_local_neighbourhood(Ring(1), 0, 5) == {4, 1}

    def test_global(self):
        assert build_local_neighbourhood(Global(), 2, 4) == {0, 1, 3}

    def test_wheel(self):
        assert build_local_neighbourhood(Wheel(hub=0), 3, 5) == {0}
        assert build_local_neighbourhood(Wheel(hub=0), 0, 5) == {1, 2, 3, 4}

    def test_forward(self):
        assert build_local_neighbourhood(Forward(2), 4, 5) == {0, 1}

    @pytest.mark.parametrize("spec", [Ring(5), Forward(5), Ring(0), Wheel(hub=5)])
    def test_invalid_extent(self, spec):
        with pytest.raises(InvalidSociometryError):
            build_local_neighbourhood(spec, 0, 5)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            build_local_neighbourhood(Global(), 5, 5)


class TestAssembly:
    def test_all_global_with_self(self):
        assert assemble_connectivity([Global(True)] * 3).dense().all()

    def test_heterogeneous(self):
        mat = assemble_connectivity([Global(False)] + [Ring(1, False)] * 4).dense()
        assert mat[0].tolist() == [False, True, True, True, True]
        assert set(np.flatnonzero(mat[2])) == {1, 3}

    @pytest.mark.parametrize("m,k", [(5, 1), (7, 2), (10, 3)])
    def test_ring_matches_brute_force(self, m, k):
        mat = assemble_connectivity([Ring(k, False)] * m).dense()
        assert np.array_equal(mat, brute_force_ring(m, k))
        assert np.array_equal(mat, mat.T)
        # circulant: every row is the first row rotated
        for i in range(m):
            assert np.array_equal(mat[i], np.roll(mat[0], i))

    def test_forward_circulant_not_symmetric(self):
        mat = assemble_connectivity([Forward(1, False)] * 5).dense()
        for i in range(5):
            assert np.array_equal(mat[i], np.roll(mat[0], i))
        assert not np.array_equal(mat, mat.T)

    def test_orphan_rejected(self):
        with pytest.raises(InvalidSociometryError):
            assemble_connectivity([Global(False)])

    def test_read_only(self):
        mat = assemble_connectivity([Global()] * 3)
        with pytest.raises(ValueError):
            mat.informers[0, 1] = False

    def test_csv_marks_self(self):
        csv = assemble_connectivity([Ring(1, True)] * 3).to_csv()
        assert csv == "X,1,1\n1,X,1\n1,1,X\n"
        csv = assemble_connectivity([Ring(1, False)] * 3).to_csv()
        assert csv.splitlines()[0] == "0,1,1"

    @given(
        st.integers(2, 12).flatmap(
            lambda m: st.lists(
                st.one_of(
                    st.builds(Global, st.booleans()),
                    st.builds(Ring, st.integers(1, m - 1), st.booleans()),
                    st.builds(Forward, st.integers(1, m - 1), st.booleans()),
                    st.builds(Wheel, st.integers(0, m - 1), st.booleans()),
                ),
                min_size=m,
                max_size=m,
            )
        )
    )
    def test_rows_match_local_neighbourhoods(self, specs):
        m = len(specs)
        a = assemble_connectivity(specs)
        b = assemble_connectivity(specs)
        assert np.array_equal(a.dense(), b.dense())
        for i, spec in enumerate(specs):
            row = set(np.flatnonzero(a.informers[i]))
            assert row == build_local_neighbourhood(spec, i, m)
            assert a.self_flags[i] == spec.include_self
            assert a.dense()[i].any()


class TestInformers:
    def test_global_with_self(self):
        assert informers(assemble_connectivity([Global(True)] * 3), 1) == [0, 1, 2]

    def test_ring_without_self(self):
        assert informers(assemble_connectivity([Ring(1, False)] * 5), 0) == [1, 4]

    def test_wheel_with_self(self):
        assert informers(assemble_connectivity([Wheel(0, True)] * 4), 2) == [0, 2]

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            informers(assemble_connectivity([Global()] * 3), 3)
