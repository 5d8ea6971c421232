import math

import numpy as np
import pytest

from entroflow import (
    DEFAULT_CONFIG_CAP,
    ENV_CONFIG_CAP,
    CouplingVector,
    LatticeSpec,
    Partition,
    ResourceCapError,
    ValidationError,
    atom_probabilities,
    block_site_partition,
    effective_config_cap,
    entropy,
    gibbs_space,
    induced_config_partition,
    is_coarsening,
    majority_first_site,
    partition_function,
    reversed_refinement_flow,
    rg_entropy_flow,
)

LN2 = math.log(2.0)


def atom_weight(space, atom):
    return float(sum(space.weights[i] for i in atom))


def flip_index_map(gibbs):
    """config index -> index of the globally flipped configuration."""
    lookup = {tuple(row): i for i, row in enumerate(gibbs.configs.tolist())}
    return {i: lookup[tuple(-gibbs.configs[i])] for i in range(len(gibbs.configs))}


class TestLatticeSpec:
    def test_validation(self):
        with pytest.raises(ValidationError):
            LatticeSpec(site_count=1)
        with pytest.raises(ValidationError):
            LatticeSpec(site_count=4, block_size=1)
        with pytest.raises(ValidationError):
            LatticeSpec(site_count=4, spacing=0.0)
        with pytest.raises(ValidationError):
            LatticeSpec(site_count=4, dimension=2)

    def test_block_length_ladder(self):
        spec = LatticeSpec(site_count=8)
        assert [spec.block_length(level) for level in range(3)] == [2, 4, 8]
        with pytest.raises(ValidationError, match="more than"):
            spec.block_length(3)
        with pytest.raises(ValidationError):
            spec.block_length(-1)

    def test_block_length_divisibility(self):
        spec = LatticeSpec(site_count=6)
        assert spec.block_length(0) == 2
        with pytest.raises(ValidationError, match="divide"):
            spec.block_length(1)

    def test_site_space_is_uniform(self):
        space = LatticeSpec(site_count=4).site_space
        assert space.point_ids == (0, 1, 2, 3)
        assert np.allclose(space.weights, 0.25)


class TestBlockSitePartition:
    def test_level_zero_pairs(self):
        p = block_site_partition(LatticeSpec(site_count=8), 0)
        assert sorted(sorted(a) for a in p.atoms) == [
            [0, 1],
            [2, 3],
            [4, 5],
            [6, 7],
        ]

    def test_levels_nest(self):
        spec = LatticeSpec(site_count=8)
        chain = [block_site_partition(spec, level) for level in range(3)]
        assert is_coarsening(chain[1], chain[0])
        assert is_coarsening(chain[2], chain[1])
        assert chain[2].n_atoms == 1


class TestMajorityFirstSite:
    def test_clear_majorities(self):
        block = np.array([[1, 1, -1], [-1, -1, 1], [1, 1, 1]], dtype=np.int8)
        assert majority_first_site(block).tolist() == [1, -1, 1]

    def test_ties_go_to_first_site(self):
        block = np.array([[1, -1], [-1, 1], [1, -1, -1, 1]][:2], dtype=np.int8)
        assert majority_first_site(block).tolist() == [1, -1]
        four = np.array([[1, -1, -1, 1], [-1, 1, 1, -1]], dtype=np.int8)
        assert majority_first_site(four).tolist() == [1, -1]

    def test_odd_under_global_flip(self):
        rng = np.random.default_rng(7)
        block = rng.choice([-1, 1], size=(64, 6)).astype(np.int8)
        assert np.array_equal(majority_first_site(-block), -majority_first_site(block))

    def test_output_values(self):
        rng = np.random.default_rng(11)
        block = rng.choice([-1, 1], size=(32, 5)).astype(np.int8)
        out = majority_first_site(block)
        assert set(np.unique(out)) <= {-1, 1}


class TestGibbsSpace:
    def test_infinite_temperature_is_uniform(self):
        g = gibbs_space((0.0, 0.0), 2)
        assert np.allclose(g.space.weights, 0.25)
        assert g.normalization == pytest.approx(4.0, rel=1e-15)

    def test_zero_field_ln2_weights(self):
        g = gibbs_space((0.0, LN2), 2)
        assert g.normalization == pytest.approx(8.5, abs=1e-12)
        by_id = dict(zip(g.space.point_ids, g.space.weights))
        assert by_id["++"] == pytest.approx(4.0 / 8.5, abs=1e-15)
        assert by_id["--"] == pytest.approx(4.0 / 8.5, abs=1e-15)
        assert by_id["+-"] == pytest.approx(0.25 / 8.5, abs=1e-15)
        assert by_id["-+"] == pytest.approx(0.25 / 8.5, abs=1e-15)

    def test_normalization_matches_transfer_matrix(self):
        k = CouplingVector(0.3, 0.5)
        g = gibbs_space(k, 8)
        z = partition_function(k, 8)
        assert abs(g.normalization - z) <= 1e-10 * z

    def test_ids_read_site_zero_first(self):
        g = gibbs_space((0.0, 0.0), 3)
        for row, pid in zip(g.configs, g.space.point_ids):
            assert pid == "".join("+" if s > 0 else "-" for s in row)

    def test_site_count_validation(self):
        with pytest.raises(ValidationError):
            gibbs_space((0.0, 0.0), 1)

    def test_configs_are_read_only(self):
        g = gibbs_space((0.0, 0.0), 2)
        with pytest.raises(ValueError):
            g.configs[0, 0] = -1


class TestConfigCap:
    def test_default(self, monkeypatch):
        monkeypatch.delenv(ENV_CONFIG_CAP, raising=False)
        assert effective_config_cap() == DEFAULT_CONFIG_CAP == 2**16

    def test_env_lowers(self, monkeypatch):
        monkeypatch.setenv(ENV_CONFIG_CAP, "8")
        assert effective_config_cap() == 8
        with pytest.raises(ResourceCapError, match="cap of 8"):
            gibbs_space((0.0, 0.0), 4)
        gibbs_space((0.0, 0.0), 3)  # 8 configurations still fit

    def test_env_cannot_raise(self, monkeypatch):
        monkeypatch.setenv(ENV_CONFIG_CAP, str(2**20))
        assert effective_config_cap() == DEFAULT_CONFIG_CAP

    @pytest.mark.parametrize("junk", ["abc", "", "1e4", "0", "-3"])
    def test_junk_values_are_loud(self, monkeypatch, junk):
        monkeypatch.setenv(ENV_CONFIG_CAP, junk)
        with pytest.raises(ValidationError):
            effective_config_cap()

    def test_default_cap_guards_large_chains(self, monkeypatch):
        monkeypatch.delenv(ENV_CONFIG_CAP, raising=False)
        with pytest.raises(ResourceCapError):
            gibbs_space((0.0, 0.0), 17)


class TestInducedConfigPartition:
    def test_singleton_blocks_keep_everything(self):
        g = gibbs_space((0.2, -0.4), 3)
        site = Partition(LatticeSpec(site_count=3).site_space, [[0], [1], [2]])
        p = induced_config_partition(g, site)
        assert p.n_atoms == 8

    def test_one_block_of_two_tracks_first_spin(self):
        g = gibbs_space((0.0, 0.0), 2)
        site = Partition(LatticeSpec(site_count=2).site_space, [[0, 1]])
        p = induced_config_partition(g, site)
        assert p.n_atoms == 2
        assert atom_probabilities(p).probabilities == (0.5, 0.5)

    def test_pair_blocks_at_infinite_temperature(self):
        g = gibbs_space((0.0, 0.0), 4)
        spec = LatticeSpec(site_count=4)
        p = induced_config_partition(g, block_site_partition(spec, 0))
        assert p.n_atoms == 4
        assert entropy(p) == pytest.approx(2.0, abs=1e-12)

    def test_noncontiguous_block_rejected(self):
        g = gibbs_space((0.0, 0.0), 4)
        site = Partition(LatticeSpec(site_count=4).site_space, [[0, 2], [1, 3]])
        with pytest.raises(ValidationError, match="contiguous"):
            induced_config_partition(g, site)

    def test_site_count_mismatch(self):
        g = gibbs_space((0.0, 0.0), 4)
        site = Partition(LatticeSpec(site_count=2).site_space, [[0, 1]])
        with pytest.raises(ValidationError, match="sites"):
            induced_config_partition(g, site)

    def test_block_map_range_checked(self):
        g = gibbs_space((0.0, 0.0), 4)
        spec = LatticeSpec(site_count=4)
        with pytest.raises(ValidationError, match=r"\+-1"):
            induced_config_partition(
                g, block_site_partition(spec, 0), block_map=lambda b: b.sum(axis=1)
            )


class TestRgEntropyFlow:
    def test_free_chain_halves_each_level(self):
        r = rg_entropy_flow((0.0, 0.0), 8, levels=3)
        assert r.entropies == pytest.approx((4.0, 2.0, 1.0), abs=1e-12)
        assert r.atom_counts == (16, 4, 2)
        assert r.coarse_flow.direction == "coarse-graining"
        assert r.refinement_flow.direction == "refinement"

    def test_strong_coupling_pins_one_bit(self):
        r = rg_entropy_flow((0.0, 5.0), 8, levels=3)
        assert all(abs(h - 1.0) < 0.05 for h in r.entropies)

    def test_levels_nest(self):
        r = rg_entropy_flow((0.4, 0.7), 8, levels=3)
        for finer, coarser in zip(r.coarse_flow, r.coarse_flow[1:]):
            assert is_coarsening(coarser, finer)

    def test_entropy_nonincreasing_random_couplings(self):
        rng = np.random.default_rng(67)
        for _ in range(10):
            k = tuple(rng.uniform(-1.5, 1.5, 2))
            r = rg_entropy_flow(k, 8, levels=3)
            drops = np.diff(r.entropies)
            assert np.all(drops <= 1e-12)

    def test_single_level_verdicts_are_trivial(self):
        r = rg_entropy_flow((0.1, 0.1), 4, levels=1)
        assert r.coarse_verdict.status == "witnessed"
        assert r.coarse_verdict.witness_index == 0
        assert r.refinement_verdict.status == "witnessed"

    def test_free_chain_verdicts_refute_a_plateau(self):
        r = rg_entropy_flow((0.0, 0.0), 8, levels=3)
        assert r.coarse_verdict.status == "refuted"
        assert r.refinement_verdict.status == "refuted"

    def test_flip_symmetry_without_field(self):
        g = gibbs_space((0.0, 0.8), 8)
        spec = LatticeSpec(site_count=8)
        p = induced_config_partition(g, block_site_partition(spec, 0))
        flip = flip_index_map(g)
        atoms = {frozenset(a) for a in p.atoms}
        for atom in p.atoms:
            image = frozenset(flip[i] for i in atom)
            assert image in atoms
            assert abs(atom_weight(g.space, atom) - atom_weight(g.space, image)) < 1e-12

    def test_direct_majority_does_not_nest(self):
        """Majority over raw sites at depth 2 splits a depth-1 atom.

        With pair blocks the tie rule makes the level-0 variable equal the
        block's first spin, so (+,-,-,-) and (+,+,-,-) share a level-0
        atom; their raw 4-site majorities differ. The chained construction
        exists precisely to avoid this.
        """
        g = gibbs_space((0.0, 0.0), 4)
        spec = LatticeSpec(site_count=4)
        level0 = induced_config_partition(g, block_site_partition(spec, 0))
        direct1 = induced_config_partition(g, block_site_partition(spec, 1))
        assert not is_coarsening(direct1, level0)
        cascade = rg_entropy_flow((0.0, 0.0), 4, levels=2).coarse_flow
        assert is_coarsening(cascade[1], cascade[0])

    def test_parameter_validation(self):
        with pytest.raises(ValidationError):
            rg_entropy_flow((0.0, 0.0), 8, levels=0)
        with pytest.raises(ValidationError, match="divide|more than"):
            rg_entropy_flow((0.0, 0.0), 6, levels=2)

    def test_depth_validated_before_enumeration(self, monkeypatch):
        monkeypatch.setenv(ENV_CONFIG_CAP, "4")
        # 8 sites exceed the lowered cap, but the depth error comes first
        with pytest.raises(ValidationError, match="more than"):
            rg_entropy_flow((0.0, 0.0), 8, levels=4)


class TestReversedRefinementFlow:
    def test_direction_and_monotone_entropy(self):
        flow = reversed_refinement_flow((0.1, 0.4), 8, levels=3)
        assert flow.direction == "refinement"
        values = [entropy(p) for p in flow]
        assert values == sorted(values)

    def test_matches_forward_flow_reversed(self):
        r = rg_entropy_flow((0.3, 0.2), 8, levels=3)
        assert tuple(reversed(tuple(r.refinement_flow))) == tuple(r.coarse_flow)
