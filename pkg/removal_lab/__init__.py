"""Hard instances, certificates and sampling testers for induced-subgraph freeness."""
