"""Simulated 1 % settling of the velocity filter against the 4.6/wc rule of thumb.

    python scripts/lpf_settling.py
"""

from smcbench.estimation import exact_settling_time, measured_settling_time, settling_time, step_response


def main():
    print("f_c [Hz]  4.6/wc [s]   exact [s]    simulated [s]  ratio")
    for fc in (50.0, 100.0, 500.0, 1000.0):
        dt = 1e-3 / fc
        resp = step_response(fc, dt, 12.0 * settling_time(fc))
        ts = measured_settling_time(resp, dt, 1.0)
        print(f"{fc:7.0f}   {settling_time(fc):.4e}  {exact_settling_time(fc):.4e}  "
              f"{ts:.4e}     {ts / settling_time(fc):.4f}")


if __name__ == "__main__":
    main()
