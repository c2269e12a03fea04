#!/usr/bin/env python3
"""
Plot Kernel Sizes

Kernelizes seeded random instances for k = 1..4 and plots the kernel
vertex and arc counts against the input size, with the explicit bounds
listed in the summary table.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import pandas as pd

from src.bounds_oracle import Instance
from src.generators import SplitMix64, gen_connected_oriented
from src.kernelizer import Kernel, kernelize, size_bounds
from src.utils.reporting import print_section, summary_table


def collect(samples: int, seed: int) -> pd.DataFrame:
    rng = SplitMix64(seed)
    rows = []
    for k in (1, 2, 3, 4):
        for _ in range(samples):
            n = 10 + rng.below(51)
            density = (1 + rng.below(5)) / 20
            G = gen_connected_oriented(n, density, rng.next_u64())
            answer = kernelize(Instance(graph=G, k=k))
            kernel = answer.instance.graph if isinstance(answer, Kernel) else None
            rows.append({
                'k': k,
                'n': G.n,
                'm': G.m,
                'outcome': 'kernel' if kernel is not None else answer.reason,
                'kernel_n': kernel.n if kernel is not None else None,
                'kernel_m': kernel.m if kernel is not None else None,
            })
    return pd.DataFrame(rows)


def main():
    parser = argparse.ArgumentParser(description="Plot kernel sizes for random instances")
    parser.add_argument("--samples", type=int, default=200, help="Instances per k")
    parser.add_argument("--seed", type=int, default=17)
    parser.add_argument("--output", type=str, default="results/kernel_sizes.png")
    args = parser.parse_args()

    print_section("Kernel sizes")
    df = collect(args.samples, args.seed)

    rows = []
    for k, group in df.groupby('k'):
        vertex_bound, arc_bound = size_bounds(k)
        kernels = group.dropna(subset=['kernel_n'])
        rows.append({
            'k': k,
            'instances': len(group),
            'kernels': len(kernels),
            'max_kernel_n': int(kernels['kernel_n'].max()) if len(kernels) else 0,
            'vertex_bound': vertex_bound,
            'max_kernel_m': int(kernels['kernel_m'].max()) if len(kernels) else 0,
            'arc_bound': arc_bound,
        })
    summary_table(rows, index='k')

    fig, axes = plt.subplots(1, 2, figsize=(12, 5))
    for k, group in df.dropna(subset=['kernel_n']).groupby('k'):
        axes[0].scatter(group['n'], group['kernel_n'], s=12, alpha=0.6, label=f"k={k}")
        axes[1].scatter(group['m'], group['kernel_m'], s=12, alpha=0.6, label=f"k={k}")
    axes[0].set_xlabel('input vertices')
    axes[0].set_ylabel('kernel vertices')
    axes[1].set_xlabel('input arcs')
    axes[1].set_ylabel('kernel arcs')
    for ax in axes:
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.suptitle('Kernel size vs input size')
    fig.tight_layout()

    output = Path(args.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=150)
    print(f"\nSaved plot to {output}")


if __name__ == "__main__":
    main()
