"""Thermodynamic formalism toolkit for the double Hofbauer potential."""
