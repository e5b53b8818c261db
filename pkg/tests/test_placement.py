from fractions import Fraction

import numpy as np
import pytest

from engine.analytics import subfile_fraction
from engine.config import PlacementMode, SystemConfig
from engine.exceptions import ConfigError
from engine.models import SubfileIndex
from engine.placement import (
    build_demand_profile,
    cache_contents,
    generate_library,
    partition_subfiles,
    place_caches,
    resolve_demands,
    worst_case_demands,
)


def test_groups_follow_file_order(four_users):
    profile = build_demand_profile(four_users, [1, 2, 1, 2])
    assert profile.group(1) == (0, 2)
    assert profile.group(2) == (1, 3)
    assert profile.group_sizes == (2, 2)
    assert profile.prefix_sums == (0, 2, 4)
    assert profile.leader(1) == 0 and profile.leader(2) == 1


def test_equal_capacities_give_singleton_groups():
    config = SystemConfig(3, 3, (1, 1, 1))
    profile = build_demand_profile(config, [3, 1, 2])
    assert profile.user_order == (1, 2, 0)
    assert [profile.group(i) for i in (1, 2, 3)] == [(1,), (2,), (0,)]


def test_group_members_sorted_by_capacity():
    config = SystemConfig(2, 4, ("3/2", "1/2", 1, 0))
    profile = build_demand_profile(config, [1, 1, 1, 2])
    assert profile.group(1) == (1, 2, 0)
    assert profile.num_active_groups == 2


def test_empty_group():
    config = SystemConfig(3, 2, (0, 1))
    profile = build_demand_profile(config, [2, 2])
    assert profile.group(1) == ()
    assert profile.leader(1) is None
    assert profile.active_files() == [2]


@pytest.mark.parametrize("demands", [[1, 2, 3, 1], [1, 2, 1], [0, 1, 1, 1]])
def test_demand_errors(four_users, demands):
    with pytest.raises(ConfigError):
        build_demand_profile(four_users, demands)


def test_worst_case_leaders_are_smallest_caches():
    config = SystemConfig(3, 5, (2, "1/4", 0, 1, "1/2"))
    profile = worst_case_demands(config)
    leaders = {profile.leader(i) for i in profile.active_files()}
    assert leaders == {2, 1, 4}
    assert profile.num_active_groups == 3


def test_resolve_demands_prefers_explicit(four_users):
    assert resolve_demands(four_users.with_demands([2, 2, 1, 1])).demands == (2, 2, 1, 1)
    assert resolve_demands(four_users).demands == worst_case_demands(four_users).demands


def test_placement_is_deterministic(four_users):
    a = place_caches(four_users)
    b = place_caches(four_users)
    c = place_caches(four_users.with_seed(8))
    for k in range(four_users.num_users):
        for i in (1, 2):
            assert np.array_equal(a.cached(k, i), b.cached(k, i))
    assert not np.array_equal(a.cached(0, 1), c.cached(0, 1))
    assert np.array_equal(a.owner_masks, b.owner_masks)


def test_exact_placement_sizes(four_users):
    placement = place_caches(four_users)
    for k in range(four_users.num_users):
        for i in (1, 2):
            positions = placement.cached(k, i)
            assert len(positions) == four_users.cached_bits_per_file(k)
            assert np.all(np.diff(positions) > 0)
    assert placement.cache_size_bits(3) == 2 * 2048


def test_bernoulli_placement_is_close(four_users):
    placement = place_caches(four_users, mode=PlacementMode.BERNOULLI)
    got = len(placement.cached(3, 1))
    assert abs(got - 2048) < 200


def test_partition_covers_each_file(four_users):
    placement = place_caches(four_users)
    partition = partition_subfiles(placement)
    for i in (1, 2):
        chunks = [partition.positions(index) for index in partition.nonempty(i)]
        joined = np.sort(np.concatenate(chunks))
        assert np.array_equal(joined, np.arange(four_users.file_size_bits))


def test_partition_matches_cache_membership(four_users):
    placement = place_caches(four_users)
    partition = partition_subfiles(placement)
    for index in partition.nonempty():
        for k in range(four_users.num_users):
            cached = np.isin(partition.positions(index), placement.cached(k, index.file_id))
            assert cached.all() if index.contains(k) else not cached.any()


def test_missing_subfile_is_empty(four_users):
    partition = partition_subfiles(place_caches(four_users))
    missing = SubfileIndex(1, 1 << 10)
    assert missing not in partition
    assert partition.size(missing) == 0
    assert len(partition.positions(missing)) == 0


def test_cache_contents_reads_library(four_users):
    placement = place_caches(four_users)
    library = generate_library(four_users)
    positions, values = cache_contents(placement, library, 2)[1]
    assert np.array_equal(values, library.file(1)[positions])


def test_placement_user_limit():
    config = SystemConfig(2, 31, (0,) * 31, file_size_bits=8)
    with pytest.raises(ConfigError):
        place_caches(config)


def test_subfile_fraction_exact(four_users):
    assert subfile_fraction(four_users, 1 << 3) == Fraction(315, 1024)
    assert subfile_fraction(four_users, 0) == Fraction(315, 1024)


@pytest.mark.slow
def test_subfile_fraction_matches_placement(four_users):
    config = four_users.with_file_size(1_000_000)
    partition = partition_subfiles(place_caches(config))
    measured = partition.size(SubfileIndex(1, 1 << 3)) / config.file_size_bits
    expected = float(subfile_fraction(config, 1 << 3))
    assert abs(measured - expected) / expected < 0.01


@pytest.mark.parametrize("demands", [[2, 1, 2, 1], [1, 1, 2, 2], [2, 2, 2, 1]])
def test_grouping_is_idempotent(demands):
    config = SystemConfig(2, 4, (1, "1/2", "1/2", 0))
    profile = build_demand_profile(config, demands)
    relabeled = SystemConfig(
        2, 4, tuple(config.cache_capacities[k] for k in profile.user_order)
    )
    again = build_demand_profile(relabeled, [demands[k] for k in profile.user_order])
    assert again.user_order == tuple(range(4))
    assert again.group_sizes == profile.group_sizes
    assert again.prefix_sums == profile.prefix_sums


def test_placement_respects_configured_user_limit(four_users):
    with pytest.raises(ConfigError):
        place_caches(four_users, max_users=3)
    assert place_caches(four_users, max_users=4).config is four_users


@pytest.mark.slow
def test_subfile_sizes_concentrate_as_files_grow(four_users):
    def deviation(num_bits, seed):
        config = four_users.with_file_size(num_bits).with_seed(seed)
        partition = partition_subfiles(place_caches(config))
        return max(
            abs(partition.size(SubfileIndex(1, mask)) / num_bits - float(subfile_fraction(config, mask)))
            for mask in range(1 << config.num_users)
        )

    sizes = (10_000, 100_000, 1_000_000)
    deviations = [np.mean([deviation(f, seed) for seed in (1, 2, 3)]) for f in sizes]
    assert deviations[0] > deviations[1] > deviations[2]
