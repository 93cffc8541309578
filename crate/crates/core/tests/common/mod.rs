#![allow(dead_code)]

pub mod embedding;
pub mod oracle;
