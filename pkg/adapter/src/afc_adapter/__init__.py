"""Reference model server for the claimattack wire protocols."""
