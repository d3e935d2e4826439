import os
import argparse
import numpy as np
import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt


def load_table(path: str):
    """Reads a result CSV written by main.py, skipping the provenance line."""
    return np.genfromtxt(path, delimiter=',', names=True, skip_header=1, dtype=float)


def plot_spectrum(path: str, output_dir: str) -> str:
    table = load_table(path)
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.semilogy(table['wavelength_nm'], table['N_expected'], linewidth=1, color='black')
    ax.set_xlabel('Signal wavelength (nm)', fontsize=16)
    ax.set_ylabel(r'$\langle N \rangle$', fontsize=16)
    ax.spines[['right', 'top']].set_visible(False)
    plt.tight_layout()
    out = os.path.join(output_dir, 'spectrum.png')
    plt.savefig(out, dpi=250)
    plt.close(fig)
    return out


def plot_jsi(path: str, output_dir: str) -> str:
    raw = np.genfromtxt(path, delimiter=',', comments='#', dtype=float)
    idler, signal, jsi = raw[0, 1:], raw[1:, 0], raw[1:, 1:]

    fig, ax = plt.subplots(figsize=(7, 6))
    mesh = ax.pcolormesh(idler, signal, jsi / jsi.max(), shading='auto', cmap='viridis')
    fig.colorbar(mesh, ax=ax, label='JSI (normalised)')
    ax.set_xlabel('Idler wavelength (nm)', fontsize=16)
    ax.set_ylabel('Signal wavelength (nm)', fontsize=16)
    plt.tight_layout()
    out = os.path.join(output_dir, 'jsi.png')
    plt.savefig(out, dpi=250)
    plt.close(fig)
    return out


def plot_map(path: str, output_dir: str) -> str:
    table = load_table(path)
    deltas = np.unique(table['Delta'])
    periods = np.unique(table['Lambda_T_m'])
    db = table['enhancement_dB'].reshape(deltas.size, periods.size)

    fig, ax = plt.subplots(figsize=(8, 6))
    mesh = ax.pcolormesh(periods * 1e2, deltas, db, shading='auto', cmap='magma')
    fig.colorbar(mesh, ax=ax, label='Enhancement (dB)')
    ax.set_xlabel('Tapering period (cm)', fontsize=16)
    ax.set_ylabel(r'Modulation depth $\Delta$', fontsize=16)
    plt.tight_layout()
    out = os.path.join(output_dir, 'map.png')
    plt.savefig(out, dpi=250)
    plt.close(fig)
    return out


def plot_growth(path: str, output_dir: str) -> str:
    table = load_table(path)
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(table['z_m'] * 1e2, table['N_expected'], linewidth=1, color='black')
    ax.set_xlabel('z (cm)', fontsize=16)
    ax.set_ylabel(r'$\langle N \rangle$', fontsize=16)
    ax.spines[['right', 'top']].set_visible(False)
    plt.tight_layout()
    out = os.path.join(output_dir, 'growth.png')
    plt.savefig(out, dpi=250)
    plt.close(fig)
    return out


def plot(args):
    os.makedirs(args.output_dir, exist_ok=True)
    written = []
    if args.spectrum:
        written.append(plot_spectrum(args.spectrum, args.output_dir))
    if args.jsi:
        written.append(plot_jsi(args.jsi, args.output_dir))
    if args.map:
        written.append(plot_map(args.map, args.output_dir))
    if args.growth:
        written.append(plot_growth(args.growth, args.output_dir))
    return written


def get_args_parser():
    parser = argparse.ArgumentParser()
    parser.add_argument('--spectrum', type=str, help='Path to spectrum.csv')
    parser.add_argument('--jsi', type=str, help='Path to jsi.csv')
    parser.add_argument('--map', type=str, help='Path to map.csv')
    parser.add_argument('--growth', type=str, help='Path to growth.csv')
    parser.add_argument('--output_dir', type=str, default='.', help='Path to output directory')
    return parser


def main(args):
    for path in plot(args):
        print(f'Saved {path}')


if __name__ == '__main__':
    parser = get_args_parser()
    args = parser.parse_args()
    main(args)
