//! Discrete-event simulation of NDN forwarders with fuzzy Interest
//! forwarding: semantic name matching in the CS and FIB, interest-digest
//! data return, and the experiment harness around it.

pub mod exec;
pub mod experiments;
pub mod forwarder;
pub mod names;
pub mod ontology;
pub mod semantic;
pub mod simcore;
pub mod time;
