"""Physical constants shared by the thermal, airflow and moisture models."""

GRAVITY = 9.81  # m/s2
P_ATM = 101325.0  # Pa
R_AIR = 287.055  # J/(kg.K), dry air
KELVIN = 273.15

RHO_REF = 1.2  # kg/m3, reference density for crack coefficients and capacitances
CP_AIR = 1006.0  # J/(kg.K)

SECONDS_PER_HOUR = 3600.0


def air_density(temperature):
    """Dry-air density (kg/m3) from the ideal gas law at temperature in Celsius."""
    return P_ATM / (R_AIR * (temperature + KELVIN))
