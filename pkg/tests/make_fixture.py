"""Regenerate the tiny three-country fixture under tests/fixtures/tiny/.

The numbers are synthetic but shaped like the real inputs: GDP per capita
observed five-yearly 1950-2015, fertility and mortality rates that decline
with GDP plus a small sinusoidal wiggle (so no candidate curve fits them
exactly), decadal GDP projection anchors through 2100, and full base-year
cohort grids. Countries:

    AAA  low income, Sub-Saharan Africa, poor and young
    BBB  upper-middle income, East Asia and Pacific (donor for AAA)
    CCC  high income, North America, rich and old

Run from the repository root:  python tests/make_fixture.py
"""
import math
from pathlib import Path

OUT = Path(__file__).parent / "fixtures" / "tiny"

FERTILE_BANDS = ["15-19", "20-24", "25-29", "30-34", "35-39", "40-44"]
AGE_BANDS = [f"{lo}-{lo + 4}" for lo in range(0, 100, 5)] + ["100+"]

ASFR_BASE = {"15-19": 0.06, "20-24": 0.22, "25-29": 0.21,
             "30-34": 0.14, "35-39": 0.07, "40-44": 0.02}
Q_BASE = [0.030, 0.004, 0.003, 0.004, 0.005, 0.006, 0.007, 0.009, 0.011,
          0.015, 0.020, 0.028, 0.040, 0.058, 0.085, 0.125, 0.180, 0.260,
          0.370, 0.500, 0.650]

COUNTRIES = [
    ("AAA", "Aleph", "Low", "SubSaharanAfrica", 600.0, 1400.0, 6000.0),
    ("BBB", "Bet", "UpperMiddle", "EastAsiaPacific", 1200.0, 3500.0, 9000.0),
    ("CCC", "Gimel", "High", "NorthAmerica", 8000.0, 35000.0, 60000.0),
]

HIST_YEARS = list(range(1950, 2016, 5))
ANCHOR_YEARS = list(range(2015, 2096, 10)) + [2100]


def gdp_hist(gdp1950, gdp2015, year):
    frac = (year - 1950) / 65.0
    smooth = gdp1950 * (gdp2015 / gdp1950) ** frac
    wiggle = 1.0 + 0.03 * math.sin(0.9 * (year - 1950))
    if year in (1950, 2015):
        wiggle = 1.0  # pin the endpoints so donor rules are easy to reason about
    return round(smooth * wiggle, 2)


def gdp_anchor(gdp2015, gdp2100, year):
    frac = (year - 2015) / 85.0
    return round(gdp2015 * (gdp2100 / gdp2015) ** frac, 2)


def asfr(band, gdp, year):
    level = 0.55 + 1.1 / (1.0 + gdp / 1200.0)
    wiggle = 1.0 + 0.04 * math.sin(0.7 * (year - 1950) + FERTILE_BANDS.index(band))
    return round(ASFR_BASE[band] * level * wiggle, 6)


def mortality(band_idx, gdp, year):
    level = 0.5 + 1.4 / (1.0 + gdp / 900.0)
    wiggle = 1.0 + 0.05 * math.sin(1.3 * (year - 1950) + band_idx)
    q = Q_BASE[band_idx] * level * wiggle
    return round(min(max(q, 1e-5), 0.95), 6)


def base_pop(iso3, band_idx):
    if iso3 == "AAA":
        female = 900000.0 * math.exp(-0.16 * band_idx)
    elif iso3 == "BBB":
        female = 1900000.0 * math.exp(-0.06 * band_idx)
    else:
        bulge = 1.0 + 0.3 * math.exp(-((band_idx - 8) ** 2) / 8.0)
        female = 800000.0 * math.exp(-0.02 * band_idx) * bulge
    return round(female), round(female * 1.04)


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    lines = ["iso3,name,income_group,region"]
    for iso3, name, income, region, *_ in COUNTRIES:
        lines.append(f"{iso3},{name},{income},{region}")
    (OUT / "countries.csv").write_text("\n".join(lines) + "\n")

    lines = ["iso3,year,gdp_pc"]
    for iso3, _, _, _, g1950, g2015, _ in COUNTRIES:
        for year in HIST_YEARS:
            lines.append(f"{iso3},{year},{gdp_hist(g1950, g2015, year)}")
    (OUT / "gdp_hist.csv").write_text("\n".join(lines) + "\n")

    lines = ["iso3,year,gdp_pc"]
    for iso3, _, _, _, _, g2015, g2100 in COUNTRIES:
        for year in ANCHOR_YEARS:
            lines.append(f"{iso3},{year},{gdp_anchor(g2015, g2100, year)}")
    (OUT / "gdp_baseline.csv").write_text("\n".join(lines) + "\n")

    lines = ["iso3,year,variable,age_group,sex,rate"]
    for iso3, _, _, _, g1950, g2015, _ in COUNTRIES:
        for year in HIST_YEARS:
            gdp = gdp_hist(g1950, g2015, year)
            for band in FERTILE_BANDS:
                lines.append(f"{iso3},{year},Fertility,{band},Female,"
                             f"{asfr(band, gdp, year)}")
            for i, band in enumerate(AGE_BANDS):
                lines.append(f"{iso3},{year},Mortality,{band},Both,"
                             f"{mortality(i, gdp, year)}")
    (OUT / "rates.csv").write_text("\n".join(lines) + "\n")

    lines = ["iso3,year,age_group,sex,count"]
    for iso3, *_ in COUNTRIES:
        for i, band in enumerate(AGE_BANDS):
            female, male = base_pop(iso3, i)
            lines.append(f"{iso3},2015,{band},Female,{female}")
            lines.append(f"{iso3},2015,{band},Male,{male}")
    (OUT / "base_pop.csv").write_text("\n".join(lines) + "\n")

    print(f"wrote fixture to {OUT}")


if __name__ == "__main__":
    main()
