pub mod benchmark;
pub mod ddl;
pub mod fd;
pub mod ident;
pub mod llm;
pub mod normalize;
pub mod prompt;
pub mod refine;
pub mod schema;
pub mod verify;

pub use ident::Ident;
pub use schema::{
    AttributeSet, Column, ColumnAnnotation, DataType, ForeignKey, FunctionalDependency, NormalForm, Schema,
    StructuralError, Table,
};
