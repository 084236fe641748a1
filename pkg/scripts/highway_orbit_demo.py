#!/usr/bin/env python3
"""Drive the action from -4 to 4 along the right lane and summarize the legs.

This is the concrete itinerary behind the headline instability run:
a10 = 0.6, a01 = 1, eps = 0.05.
"""
from scatmap import ModelParams
from scatmap.diffusion import Mechanism, build_pseudo_orbit_highway

params = ModelParams(a00=0.0, a10=0.6, a01=1.0, eps=0.05)
orbit = build_pseudo_orbit_highway(params, -4.0, 4.0)

n_scatter = sum(len(l.points) - 1 for l in orbit.legs
                if l.mechanism is Mechanism.SCATTERING)
n_inner = sum(1 for l in orbit.legs if l.mechanism is Mechanism.INNER)
worst_dev = max(l.deviation_end for l in orbit.legs
                if l.mechanism is Mechanism.SCATTERING)

print(f"legs: {len(orbit.legs)}  (map steps: {n_scatter}, rotor legs: {n_inner})")
print(f"action: {orbit.legs[0].points[0].I:+.3f} -> {orbit.final_point.I:+.4f}")
print(f"worst end-of-burst deviation from the lane: {worst_dev:.3e}")
print(f"total model time: {orbit.total_model_time:.4g}")
print(f"burst cap: {orbit.steps_per_burst} steps (c = {orbit.c}, a = {orbit.a})")
