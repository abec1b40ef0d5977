//! JSON output with a fixed float format: every `f64` is written with 17
//! significant digits in scientific notation, which round-trips exactly and
//! does not depend on the shortest-representation algorithm of the
//! serializer.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// `{:.16e}`: one leading digit plus 16 fractional digits.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

struct FixedFloat<F> {
    inner: F,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl<F: Formatter> Formatter for FixedFloat<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

fn write_with<F: Formatter, V: Serialize + ?Sized>(value: &V, formatter: F) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat { inner: formatter });
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Indented JSON followed by a newline.
pub fn to_pretty(value: &(impl Serialize + ?Sized)) -> String {
    let mut s = write_with(value, PrettyFormatter::with_indent(b"  "));
    s.push('\n');
    s
}

/// Single-line JSON, no trailing newline.
pub fn to_line(value: &(impl Serialize + ?Sized)) -> String {
    write_with(value, serde_json::ser::CompactFormatter)
}
