//! The `.pcm` parity-check matrix text format.
//!
//! Optional `#` comment lines, then a `<rows> <cols>` header, then exactly
//! `rows` lines of exactly `cols` characters from `{0, 1}`. Trailing blank
//! lines are tolerated; anything else after the matrix is an error. The
//! writer emits the same shape byte-for-byte, so parse/write round-trips.

use thiserror::Error;

use crate::gf2::BitMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct PcmError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> PcmError {
    PcmError {
        line,
        column,
        message: message.into(),
    }
}

pub fn parse_pcm(text: &str) -> Result<BitMatrix, PcmError> {
    let mut lines = text.lines().enumerate();
    let (header_index, header) = loop {
        match lines.next() {
            None => return Err(err(1, 1, "missing header line")),
            Some((_, line)) if line.trim_start().starts_with('#') => continue,
            Some(found) => break found,
        }
    };
    let header_line = header_index + 1;
    let mut parts = header.split_whitespace();
    let rows: usize = parts
        .next()
        .ok_or_else(|| err(header_line, 1, "expected `<rows> <cols>` header"))?
        .parse()
        .map_err(|_| err(header_line, 1, "row count is not a number"))?;
    let cols: usize = parts
        .next()
        .ok_or_else(|| err(header_line, 1, "header is missing the column count"))?
        .parse()
        .map_err(|_| err(header_line, 1, "column count is not a number"))?;
    if parts.next().is_some() {
        return Err(err(header_line, 1, "unexpected tokens after the header"));
    }

    let mut matrix = BitMatrix::zeros(rows, cols);
    let mut last_line = header_line;
    for row in 0..rows {
        let Some((index, line)) = lines.next() else {
            return Err(err(
                last_line + 1,
                1,
                format!("expected {rows} matrix rows, found {row}"),
            ));
        };
        last_line = index + 1;
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != cols {
            return Err(err(
                last_line,
                chars.len().min(cols) + 1,
                format!("expected {cols} columns, found {}", chars.len()),
            ));
        }
        for (col, ch) in chars.iter().enumerate() {
            match ch {
                '0' => {}
                '1' => matrix.set(row, col, true),
                other => {
                    return Err(err(
                        last_line,
                        col + 1,
                        format!("invalid character {other:?}, expected 0 or 1"),
                    ))
                }
            }
        }
    }
    for (index, line) in lines {
        if !line.trim().is_empty() {
            return Err(err(index + 1, 1, "unexpected content after the matrix"));
        }
    }
    Ok(matrix)
}

pub fn write_pcm(matrix: &BitMatrix) -> String {
    let mut out = format!("{} {}\n", matrix.row_count(), matrix.col_count());
    for i in 0..matrix.row_count() {
        for j in 0..matrix.col_count() {
            out.push(if matrix.get(i, j) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}
