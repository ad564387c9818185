//! Litmus-test DSL: AST, parser, printer, address binding and the embedded
//! corpus.

mod addr;
mod ast;
mod corpus;
mod parse;
mod print;

pub use addr::{bind_addresses, AddressMap, ADDRESS_STRIDE};
pub use ast::*;
pub use corpus::{corpus_test, load_corpus, CORPUS_SOURCES};
pub use parse::{
    is_register_name, parse, resolve_register, ParseError, ParseErrorKind, HEADER, VERSION,
};
