"""Hopf structure tensors: basis generation, maps, blocks, serialization."""

import numpy as np
import pytest

from qpermlab.errors import Truncated
from qpermlab.hopf import build_hopf, generate_basis, hopf_from_json, hopf_to_json
from qpermlab.magic import (
    GroupTable,
    all_permutations,
    dual_group,
    kac_paljutkin,
    symmetric_group,
)
from tests.conftest import random_density


def test_basis_dimensions(kp, s4c, d4):
    assert kp.dim == 8
    assert s4c.dim == 24
    assert d4.dim == 24


def test_s4_dimension_matches_span_oracle():
    # brute force: F(S_4) is spanned by the 24 one-point diagonal indicators
    u = symmetric_group(4)
    deltas = np.stack([np.diag(np.eye(24)[k]) for k in range(24)])
    rank = np.linalg.matrix_rank(deltas.reshape(24, -1))
    assert build_hopf(u).dim == rank == 24


def test_dual_s4_dimension_matches_group_algebra_oracle(s4_table, d4):
    mats = np.stack([s4_table.regular_representation(g) for g in range(24)])
    rank = np.linalg.matrix_rank(mats.reshape(24, -1))
    assert d4.dim == rank == 24


def test_basis_is_orthonormal_and_starts_at_identity(kp, d4):
    for h in (kp, d4):
        gram = np.einsum("rij,sij->rs", h.basis.conj(), h.basis)
        assert np.max(np.abs(gram - np.eye(h.dim))) < 1e-10
        eye = np.eye(h.ambient_dim) / np.sqrt(h.ambient_dim)
        assert np.max(np.abs(h.basis[0] - eye)) < 1e-12


def test_basis_closed_under_multiplication_and_star(kp, d3):
    for h in (kp, d3):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(h.dim) + 1j * rng.standard_normal(h.dim)
        y = rng.standard_normal(h.dim) + 1j * rng.standard_normal(h.dim)
        a, b = h.from_coords(x), h.from_coords(y)
        _, res_prod = h.coords(a @ b)
        _, res_star = h.coords(a.conj().T)
        assert res_prod < 1e-9
        assert res_star < 1e-9


def test_truncation_error_for_infinite_image():
    # dual of Z (an infinite cyclic image) cannot close; emulate with a cap
    u = kac_paljutkin()
    with pytest.raises(Truncated):
        generate_basis(u, max_word_len=0)


def test_coords_examples(kp):
    eye = np.eye(kp.ambient_dim)
    c, residual = kp.coords(eye)
    assert residual < 1e-12
    assert np.max(np.abs(c - kp.unit_coords)) < 1e-12
    _, residual = kp.coords(kp.magic.entries[0, 0])
    assert residual < 1e-12


def test_coords_off_algebra_residual_matches_projection_oracle(d3, rng):
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    a = (a + a.conj().T) / 2
    _, residual = d3.coords(a)
    # independent oracle: distance from a to span(basis)
    stack = d3.basis.reshape(d3.dim, -1).T
    q, _ = np.linalg.qr(stack)
    vec = a.reshape(-1)
    distance = np.linalg.norm(vec - q @ (q.conj().T @ vec))
    assert residual == pytest.approx(distance, abs=1e-9)
    assert residual > 1e-3


def test_comultiplication_on_classical_s3(s3c):
    # Delta(1_{j -> i}) = sum_k 1_{k -> i} (x) 1_{j -> k}, where the
    # indicator 1_{j -> i} is the generator with row i and column j.
    h = s3c
    for i in range(3):
        for j in range(3):
            lhs = np.einsum("r,rst->st", h.gen_coords[i, j], h.comult)
            rhs = sum(np.einsum("s,t->st", h.gen_coords[i, k], h.gen_coords[k, j])
                      for k in range(3))
            assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_coassociativity(builtin_groups):
    for name, h in builtin_groups.items():
        t = np.asarray(h.comult)
        lhs = np.einsum("xrc,rab->xabc", t, t)
        rhs = np.einsum("xar,rbc->xabc", t, t)
        assert np.max(np.abs(lhs - rhs)) <= 1e-8, name


def test_counital_property(builtin_groups):
    for name, h in builtin_groups.items():
        left = np.einsum("rst,s->rt", h.comult, h.counit_vec)
        right = np.einsum("rst,t->rs", h.comult, h.counit_vec)
        eye = np.eye(h.dim)
        assert np.max(np.abs(left - eye)) <= 1e-8, name
        assert np.max(np.abs(right - eye)) <= 1e-8, name


def test_counit_on_kp_is_dual_to_first_block(kp):
    # the counit slice is the identity permutation matrix
    values = np.einsum("ijr,r->ij", kp.gen_coords, kp.counit_vec)
    assert np.max(np.abs(values - np.eye(4))) < 1e-10
    # and evaluates to 1 on f_1
    f1 = np.zeros((6, 6)); f1[0, 0] = 1
    c, _ = kp.coords(f1)
    assert np.dot(c, kp.counit_vec) == pytest.approx(1.0)


def test_counit_on_dual_group_is_all_ones(d3, s3_table):
    for g in range(s3_table.order):
        c, _ = d3.coords(s3_table.regular_representation(g))
        assert np.dot(c, d3.counit_vec) == pytest.approx(1.0, abs=1e-9)


def test_antipode_on_generators_and_words(kp):
    # S(u_ij) = u_ji
    for i in range(4):
        for j in range(4):
            assert np.max(np.abs(kp.antipode_mat @ kp.gen_coords[i, j]
                                 - kp.gen_coords[j, i])) < 1e-9
    # S(u_12 u_34) = u_43 u_21
    w = kp.multiply_coords(kp.gen_coords[0, 1], kp.gen_coords[2, 3])
    target = kp.multiply_coords(kp.gen_coords[3, 2], kp.gen_coords[1, 0])
    assert np.max(np.abs(kp.antipode_mat @ w - target)) < 1e-9


def test_antipode_classical_is_inversion(s3c):
    perms = all_permutations(3)
    index = {p: k for k, p in enumerate(perms)}
    for k, sigma in enumerate(perms):
        delta = np.zeros((6, 6)); delta[k, k] = 1
        c, _ = s3c.coords(delta)
        flipped = s3c.from_coords(s3c.antipode_mat @ c)
        inv = tuple(np.argsort(sigma))
        expected = np.zeros((6, 6)); expected[index[inv], index[inv]] = 1
        assert np.max(np.abs(flipped - expected)) < 1e-9


def test_antipode_dual_group_is_group_inverse(d3, s3_table):
    for g in range(s3_table.order):
        c, _ = d3.coords(s3_table.regular_representation(g))
        flipped = d3.from_coords(d3.antipode_mat @ c)
        target = s3_table.regular_representation(s3_table.inverse(g))
        assert np.max(np.abs(flipped - target)) < 1e-9


def test_antipode_squared_and_antipodal_property(builtin_groups):
    for name, h in builtin_groups.items():
        assert np.max(np.abs(h.antipode_mat @ h.antipode_mat - np.eye(h.dim))) <= 1e-8, name
        for i in range(h.n):
            for j in range(h.n):
                left = sum(h.multiply_coords(h.antipode_mat @ h.gen_coords[i, k],
                                             h.gen_coords[k, j]) for k in range(h.n))
                right = sum(h.multiply_coords(h.gen_coords[i, k],
                                              h.antipode_mat @ h.gen_coords[k, j])
                            for k in range(h.n))
                target = (1.0 if i == j else 0.0) * h.unit_coords
                assert np.max(np.abs(left - target)) <= 1e-8, name
                assert np.max(np.abs(right - target)) <= 1e-8, name


def test_haar_uniform_on_classical(s4c):
    for k in range(24):
        delta = np.zeros((24, 24)); delta[k, k] = 1
        c, _ = s4c.coords(delta)
        assert np.dot(c, s4c.haar_vec) == pytest.approx(1 / 24, abs=1e-12)


def test_haar_on_dual_group_is_delta_e(d4, s4_table):
    for g in range(s4_table.order):
        c, _ = d4.coords(s4_table.regular_representation(g))
        expected = 1.0 if g == s4_table.identity else 0.0
        assert np.dot(c, d4.haar_vec) == pytest.approx(expected, abs=1e-9)


def test_haar_matches_kp_trace_form(kp):
    # linear-solve result equals the block trace form (f^1+f^2+f^3+f^4+2 tr)/8
    def trace_form(a):
        return (np.trace(a[:4, :4]) + 2 * np.trace(a[4:, 4:])) / 8
    for r in range(kp.dim):
        assert np.dot(np.eye(kp.dim)[r], kp.haar_vec) == pytest.approx(
            trace_form(kp.basis[r]), abs=1e-10)


def test_haar_annihilation_on_random_states(builtin_groups):
    rng = np.random.default_rng(11)
    for name, h in builtin_groups.items():
        for _ in range(20 if h.dim <= 8 else 5):
            rho = random_density(h.ambient_dim, rng)
            phi = np.einsum("rij,ji->r", h.basis, rho)
            left = np.einsum("rst,s,t->r", h.comult, h.haar_vec, phi)
            right = np.einsum("rst,s,t->r", h.comult, phi, h.haar_vec)
            assert np.max(np.abs(left - h.haar_vec)) <= 1e-8, name
            assert np.max(np.abs(right - h.haar_vec)) <= 1e-8, name


def test_block_structure(kp, s4c, d4):
    assert kp.block_dims() == [1, 1, 1, 1, 2]
    assert s4c.block_dims() == [1] * 24
    assert d4.block_dims() == [1, 1, 2, 3, 3]   # irreducible dimensions of S_4


def test_block_projections_partition_unity(builtin_groups):
    for name, h in builtin_groups.items():
        total = sum(b.projection_ambient for b in h.blocks)
        assert np.max(np.abs(total - np.eye(h.ambient_dim))) <= 1e-8, name
        for a, ba in enumerate(h.blocks):
            for c, bc in enumerate(h.blocks):
                prod = ba.projection_ambient @ bc.projection_ambient
                target = ba.projection_ambient if a == c else 0 * prod
                assert np.max(np.abs(prod - target)) <= 1e-8, name
        for b in h.blocks:
            z = b.projection_ambient
            for r in range(h.dim):
                comm = z @ h.basis[r] - h.basis[r] @ z
                assert np.max(np.abs(comm)) <= 1e-8, name


def test_serialization_roundtrip_exact(kp):
    text = hopf_to_json(kp)
    back = hopf_from_json(text)
    assert back.dim == kp.dim
    assert back.words == kp.words
    for attr in ("basis", "word_coords", "mult", "star", "comult",
                 "counit_vec", "antipode_mat", "haar_vec", "gen_coords"):
        a, b = np.asarray(getattr(kp, attr)), np.asarray(getattr(back, attr))
        assert a.shape == b.shape and np.array_equal(a, b), attr
    assert np.array_equal(np.asarray(kp.magic.entries), np.asarray(back.magic.entries))
    assert [b.dim for b in back.blocks] == [b.dim for b in kp.blocks]
    for b1, b2 in zip(kp.blocks, back.blocks):
        assert np.array_equal(np.asarray(b1.projection_ambient),
                              np.asarray(b2.projection_ambient))
    # a second round trip is byte-identical
    assert hopf_to_json(back) == text


def test_dual_z2_minimal_case():
    z2 = GroupTable.from_table([[0, 1], [1, 0]], 0, [1])
    h = build_hopf(dual_group(z2))
    assert h.dim == 2
    assert h.block_dims() == [1, 1]


def test_non_subgroup_carrier_rejected():
    # the indicator unitary of a subset of S_3 that is not closed under
    # composition is a perfectly valid magic unitary, but its algebra does
    # not carry the quantum group structure; the build must fail loudly at
    # whichever structure map breaks first
    from qpermlab.errors import (
        InconsistentComultiplication, NoAntipode, NoCounit, NoHaar,
    )
    from qpermlab.magic import MagicUnitary, validate_magic

    subset = [(0, 1, 2), (1, 0, 2), (2, 1, 0)]      # e, (12), (13): (12)(13) missing
    entries = np.zeros((3, 3, 3, 3), dtype=complex)
    for k, sigma in enumerate(subset):
        for j in range(3):
            entries[sigma[j], j, k, k] = 1.0
    u = MagicUnitary(n=3, ambient_dim=3, entries=entries, label="non-subgroup")
    assert validate_magic(u).passes
    with pytest.raises((InconsistentComultiplication, NoCounit, NoAntipode, NoHaar)):
        build_hopf(u)
