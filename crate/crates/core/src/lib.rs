//! Exact computation in finitely presented groups built from free abelian
//! pieces: right-angled Artin groups, fundamental groups of graphs of groups
//! with free abelian vertex groups and cyclic edge groups, and subgroups of
//! direct products of these.
//!
//! Everything here is deterministic and allocation-only (`no_std` +
//! `alloc`): integer arithmetic is arbitrary precision, all set/map state
//! uses ordered collections, and every search enumerates candidates in a
//! fixed shortlex order. Procedures that cannot decide within a caller
//! supplied budget say so explicitly instead of looping forever.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod baumslag_solitar;
pub mod graph_of_groups;
pub mod lattice;
pub mod quotients;
pub mod raag;
pub mod subdirect;
pub mod words;
