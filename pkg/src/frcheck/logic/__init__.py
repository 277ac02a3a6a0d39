"""Modal formulas, Kripke semantics and a bounded model finder."""
