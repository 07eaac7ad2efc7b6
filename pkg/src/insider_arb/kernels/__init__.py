from .bessel import bessel_i, bessel_ratio, log_bessel_i
from .distributions import (SkellamParams, log_skellam_pmf, ratio_exp_cdf, ratio_exp_pdf, ratio_exp_sample,
                            skellam_entropy, skellam_pmf, skellam_support)
from .quadrature import adaptive_integral
from .stats import Estimate, exact_sum, ks_statistic, mean_se, proportion
from .streams import SeededStream, stream

__all__ = [
    "bessel_i", "bessel_ratio", "log_bessel_i",
    "SkellamParams", "log_skellam_pmf", "ratio_exp_cdf", "ratio_exp_pdf", "ratio_exp_sample",
    "skellam_entropy", "skellam_pmf", "skellam_support",
    "adaptive_integral",
    "Estimate", "exact_sum", "ks_statistic", "mean_se", "proportion",
    "SeededStream", "stream",
]
