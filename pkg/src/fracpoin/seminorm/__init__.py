"""Discrete Gagliardo seminorm forms."""

from .assembly import (ConfigurationError, QuadForm, assemble_regional, assemble_restricted,
                       dense_form, tail_weight_1d, tail_weight_box)
from .lines import AccuracyError, cross_slab_energy, line_energies, seminorm_loss_sloane

__all__ = ["ConfigurationError", "QuadForm", "assemble_regional", "assemble_restricted",
           "dense_form", "tail_weight_1d", "tail_weight_box", "AccuracyError",
           "cross_slab_energy", "line_energies", "seminorm_loss_sloane"]
