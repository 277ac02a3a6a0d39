"""The four-agent protocol as a Kripke carrier, its bridge rules and checked derivations."""
