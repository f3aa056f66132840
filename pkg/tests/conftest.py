def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: heavier Monte Carlo checks (full grid, many runs)")
