#!/usr/bin/env python3
"""Writes data/synthetic12.json, the 12-period three-lane testbed.

Each lane is one origin, one destination and one towboat with its own barge
fleet. Ports hold no stock, so every (lane, period) pair is an independent
design problem. Water levels follow a seasonal profile with a low-water dip
in October and November (t = 10, 11) while harvest demand peaks there.
"""

import json
import sys
from pathlib import Path

T = 12
LANES = 3
BARGES_PER_LANE = 12
COMMODITIES = ["grain", "coal", "fertilizer", "steel"]
# Commodities shipped on each lane; lane 3 carries two.
LANE_GOODS = [["grain"], ["coal"], ["fertilizer", "steel"]]

# Mean waterway limit in tons per loaded barge, by month.
WATER_PROFILE = [1450, 1450, 1500, 1550, 1500, 1400, 1300, 1200, 1100, 760, 820, 1200]
LANE_WATER_SCALE = [1.0, 0.95, 1.05]

# Monthly demand in tons per commodity at the lane's destination.
BASE_DEMAND = {
    "grain": [1100, 1050, 1000, 1000, 1050, 1100, 1150, 1200, 1500, 2200, 2100, 1300],
    "coal": [1300, 1300, 1250, 1200, 1200, 1250, 1300, 1300, 1300, 1400, 1400, 1350],
    "fertilizer": [600, 700, 900, 1000, 800, 500, 400, 400, 500, 900, 900, 700],
    "steel": [500, 500, 550, 550, 600, 600, 600, 550, 550, 650, 650, 500],
}
DENSITY = {"grain": 0.8, "coal": 1.0, "fertilizer": 0.9, "steel": 1.0}


def main(out_path: Path) -> None:
    origins = [f"O{k + 1}" for k in range(LANES)]
    dests = [f"D{k + 1}" for k in range(LANES)]
    barges = [f"B{k + 1:02d}" for k in range(LANES * BARGES_PER_LANE)]
    tows = [f"S{k + 1}" for k in range(LANES)]
    M, B, S, A = len(COMMODITIES), len(barges), len(tows), LANES
    lane_of_barge = [b // BARGES_PER_LANE for b in range(B)]

    def zeros(*dims):
        if len(dims) == 1:
            return [0.0] * dims[0]
        return [zeros(*dims[1:]) for _ in range(dims[0])]

    demand = zeros(M, LANES, T)
    supply_mean = zeros(M, LANES, T)
    for lane, goods in enumerate(LANE_GOODS):
        for good in goods:
            m = COMMODITIES.index(good)
            for t in range(T):
                demand[m][lane][t] = float(BASE_DEMAND[good][t])
                supply_mean[m][lane][t] = 1.3 * BASE_DEMAND[good][t]

    barge_avail = zeros(B, LANES, T)
    for b in range(B):
        for t in range(T):
            barge_avail[b][lane_of_barge[b]][t] = 1.0
    tow_avail = zeros(S, LANES, T)
    for s in range(S):
        for t in range(T):
            tow_avail[s][s][t] = 1.0

    # Slightly different fleets avoid ties between interchangeable barges.
    handling = [[[300.0 + 7.0 * (b % BARGES_PER_LANE) for _ in range(T)] for b in range(B)]
                for _ in range(M)]
    weight_cap = [1500.0 + 10.0 * (b % BARGES_PER_LANE) for b in range(B)]

    water_mean = [[LANE_WATER_SCALE[a] * WATER_PROFILE[t] for t in range(T)] for a in range(A)]
    water = {
        "mean": water_mean,
        "stdev": [[0.08 * v for v in row] for row in water_mean],
        "lower": [[0.8 * v for v in row] for row in water_mean],
        "upper": [[1.2 * v for v in row] for row in water_mean],
    }
    supply = {
        "mean": supply_mean,
        "stdev": [[[0.05 * v for v in row] for row in plane] for plane in supply_mean],
        "lower": [[[0.9 * v for v in row] for row in plane] for plane in supply_mean],
        "upper": [[[1.1 * v for v in row] for row in plane] for plane in supply_mean],
    }

    instance = {
        "origin_ports": origins,
        "destination_ports": dests,
        "commodities": COMMODITIES,
        "barges": barges,
        "towboats": tows,
        "num_periods": T,
        "arcs": [[origins[k], dests[k]] for k in range(LANES)],
        "load_time_hours": 6.0,
        "unload_time_hours": 6.0,
        "mean_lock_delay_hours": 2.5,
        "towboat_fixed_cost_usd": 4000.0,
        "barge_handling_cost_usd": handling,
        "transport_cost_usd_per_ton": 4.0,
        "procurement_cost_usd_per_ton": 18.0,
        "holding_cost_usd_per_ton_period": 1.0,
        "shortage_penalty_usd_per_ton": 150.0,
        "demand_tons": demand,
        "storage_cap_tons": 0.0,
        "deterioration_rate": 0.0,
        "tow_min_barges": 1.0,
        "tow_max_barges": float(BARGES_PER_LANE),
        "barge_weight_cap_tons": weight_cap,
        "barge_volume_cap_cuft": 2400.0,
        "commodity_density_tons_per_cuft": [DENSITY[c] for c in COMMODITIES],
        "barge_avail": barge_avail,
        "tow_avail": tow_avail,
        "port_barge_limit": float(BARGES_PER_LANE),
        "port_tow_limit": 1.0,
        "distance_miles": [310.0, 280.0, 350.0],
        "lock_count": [6.0, 5.0, 7.0],
        "travel_window_hours": 720.0,
        "tow_speed_mph": 6.0,
        "initial_inventory_tons": 0.0,
    }
    config = {
        "instance": instance,
        "stochastic": {
            "kind": "truncated_normal",
            "supply_tons": supply,
            "waterway_cap_tons": water,
            "origin_channel_multiplier": 1.25,
            "dest_channel_multiplier": 1.25,
        },
        "run": {
            "solver": "extensive",
            "factors": [-0.4, 0.0, 0.4],
            "output_dir": "out/synthetic12",
            "seed": 2024,
            "workers": 0,
            "sample_size": 4,
            "tolerance": 1e-6,
        },
    }
    out_path.write_text(json.dumps(config, indent=1) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "synthetic12.json")
