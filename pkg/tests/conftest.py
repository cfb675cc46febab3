"""Shared fixtures"""
import pytest

from src.channel import CorrelatedLink, db_to_linear, preset_params


def build_link(preset="strong", mu1_db=20.0, mu2_db=5.0, rho=0.5):
    return CorrelatedLink(params=preset_params(preset), mu1=db_to_linear(mu1_db),
                          mu2=db_to_linear(mu2_db), rho=rho)


@pytest.fixture
def make_link():
    return build_link


@pytest.fixture
def strong_link():
    return build_link("strong")
