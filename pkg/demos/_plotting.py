"""Optional figure output shared by the demo scripts."""

from pathlib import Path

FIG_DIR = Path(__file__).resolve().parent / "figures"

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:  # figures are a bonus; every demo also prints its numbers
    plt = None


def save(fig, name):
    FIG_DIR.mkdir(exist_ok=True)
    path = FIG_DIR / name
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    print(f"saved {path}")
