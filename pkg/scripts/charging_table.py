"""Charging probability and ergotropy at the ideal charging time, gamma = 0.05 kappa."""
from qbattery.runner import table_p


def main():
    table = table_p()
    print(f"{'R':>8s} {'p(tau_ch)':>10s} {'W_B/w0':>10s}")
    for R, _, _, pop, w in table.data:
        print(f"{R:8g} {pop:10.5f} {w:10.5f}")


if __name__ == "__main__":
    main()
