"""Smoke test for the python module against the C++ core."""

import json
import os
import tempfile

import mnsga

TOY_CONFIG = json.dumps(
    {
        "population_size": 8,
        "generations": 3,
        "mutation_prob": 0.2,
        "seed": 5,
        "space": {
            "max_slots": [2, 1, 1, 1, 1],
            "channels": [[24, 32], [40, 48], [56], [104], [144]],
            "allowed_ops": ["K3GBe1", "K3GBe2", "K3GBe3"],
            "input_resolution": 64,
        },
    }
)


def test_genome_roundtrip_and_cost():
    genome = mnsga.random_genome_json(1, TOY_CONFIG)
    assert mnsga.validate_genome_json(genome, TOY_CONFIG) == []
    cost = mnsga.cost_of_genome_json(genome, TOY_CONFIG)
    assert cost["macs"] > 0
    assert cost["flops"] == 2 * cost["macs"]
    loss = mnsga.surrogate_loss(genome, TOY_CONFIG)
    assert 0 < loss <= 1


def test_search_is_deterministic():
    a = mnsga.search(TOY_CONFIG)
    b = mnsga.search(TOY_CONFIG)
    assert a["archive_json"] == b["archive_json"]
    assert a["metrics_csv"] == b["metrics_csv"]
    front = json.loads(a["archive_json"])
    assert len(front) > 0
    assert {"loss", "macs", "params"} <= set(front[0])


def test_weight_mapping_round_trip():
    with tempfile.TemporaryDirectory() as tmp:
        supernet = os.path.join(tmp, "supernet.bin")
        mapped = os.path.join(tmp, "mapped.bin")
        mnsga.make_supernet(supernet, 3, TOY_CONFIG)
        genome = mnsga.random_genome_json(2, TOY_CONFIG)
        layers = mnsga.map_weights(supernet, genome, mapped, TOY_CONFIG)
        assert layers > 0
        assert os.path.exists(mapped)
        assert os.path.exists(mapped + ".provenance.json")


def main():
    test_genome_roundtrip_and_cost()
    test_search_is_deterministic()
    test_weight_mapping_round_trip()
    print("python smoke passed")


if __name__ == "__main__":
    main()
