//! News archives in NITF-style XML, one article per file.
//!
//! Recognized elements: `pubdata@date.publication` (`YYYYMMDD...`) or the
//! `publication_year` / `publication_month` / `publication_day_of_month`
//! meta triple for the date; `doc-id@id-string` for the identifier; `hl1`
//! (falling back to `title`) for the headline; every text node under
//! `body.content` for the body; `byline` for the author. Tags are stripped.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use log::warn;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{CorpusKind, CorpusManifest, DocumentRecord};
use crate::error::{Error, Result};
use crate::normalize::Normalizer;
use crate::temporal::TemporalKey;

#[derive(Debug, Default)]
struct Article {
    doc_id: Option<String>,
    date: Option<NaiveDate>,
    year: Option<i32>,
    month: Option<u32>,
    day: Option<u32>,
    headline: String,
    title: String,
    body: String,
    byline: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sink {
    None,
    Headline,
    Title,
    Body,
    Byline,
}

fn attr(e: &BytesStart<'_>, name: &str) -> Option<String> {
    e.try_get_attribute(name).ok().flatten().and_then(|a| {
        a.normalized_value(quick_xml::XmlVersion::Implicit1_0)
            .ok()
            .map(|v| v.into_owned())
    })
}

/// Element boundaries separate words; text and entity nodes do not.
fn boundary(art: &mut Article, sink: Option<Sink>) {
    if let Some(buf) = sink_buf(art, sink) {
        if !buf.is_empty() && !buf.ends_with(char::is_whitespace) {
            buf.push(' ');
        }
    }
}

/// Parses one article. `fallback_id` is used when the XML carries no id.
pub fn parse_news_article(
    xml: &str,
    fallback_id: &str,
    corpus_id: &str,
    normalizer: &Normalizer,
) -> std::result::Result<DocumentRecord, String> {
    let mut reader = Reader::from_str(xml);
    let mut art = Article::default();
    // Innermost capturing element; nested markup inherits its parent's sink.
    let mut stack: Vec<Sink> = Vec::new();
    let mut saw_root = false;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| format!("XML error at byte {}: {e}", reader.error_position()))?;
        match event {
            Event::Start(e) => {
                saw_root = true;
                let name = e.local_name();
                let sink = match name.as_ref() {
                    "hl1" => Sink::Headline,
                    "title" => Sink::Title,
                    "body.content" => Sink::Body,
                    "byline" => Sink::Byline,
                    _ => *stack.last().unwrap_or(&Sink::None),
                };
                handle_attrs(&e, &mut art);
                boundary(&mut art, stack.last().copied());
                stack.push(sink);
            }
            Event::Empty(e) => {
                saw_root = true;
                handle_attrs(&e, &mut art);
                boundary(&mut art, stack.last().copied());
            }
            Event::End(_) => {
                stack.pop();
                boundary(&mut art, stack.last().copied());
            }
            Event::Text(t) => {
                let text = t.xml10_content();
                sink_text(&mut art, stack.last().copied(), &text);
            }
            Event::CData(t) => {
                let text = t.into_inner().into_owned();
                sink_text(&mut art, stack.last().copied(), &text);
            }
            Event::GeneralRef(r) => {
                let resolved = match r.resolve_char_ref() {
                    Ok(Some(c)) => c.to_string(),
                    _ => match &*r {
                        "amp" => "&".into(),
                        "lt" => "<".into(),
                        "gt" => ">".into(),
                        "apos" => "'".into(),
                        "quot" => "\"".into(),
                        _ => " ".into(),
                    },
                };
                sink_text(&mut art, stack.last().copied(), &resolved);
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !saw_root {
        return Err("no XML elements found".into());
    }
    if !stack.is_empty() {
        return Err("unexpected end of document".into());
    }

    let date = art.date.or_else(|| match (art.year, art.month, art.day) {
        (Some(y), Some(m), Some(d)) => NaiveDate::from_ymd_opt(y, m, d),
        _ => None,
    });
    let headline = if art.headline.trim().is_empty() {
        art.title
    } else {
        art.headline
    };
    let mut text = headline.clone();
    text.push('\n');
    text.push_str(&art.body);
    let headline = headline.trim().to_owned();
    let byline = art.byline.trim();
    let author = byline
        .strip_prefix("By ")
        .or_else(|| byline.strip_prefix("BY "))
        .unwrap_or(byline)
        .trim()
        .to_owned();
    Ok(DocumentRecord {
        doc_id: art.doc_id.unwrap_or_else(|| fallback_id.to_owned()),
        corpus_id: corpus_id.to_owned(),
        temporal_key: date.map(TemporalKey::Date),
        author: (!author.is_empty()).then_some(author),
        title: (!headline.is_empty()).then_some(headline),
        tokens: normalizer.tokens(&text),
    })
}

fn sink_buf(art: &mut Article, sink: Option<Sink>) -> Option<&mut String> {
    match sink? {
        Sink::Headline => Some(&mut art.headline),
        Sink::Title => Some(&mut art.title),
        Sink::Body => Some(&mut art.body),
        Sink::Byline => Some(&mut art.byline),
        Sink::None => None,
    }
}

fn sink_text(art: &mut Article, sink: Option<Sink>, text: &str) {
    if let Some(buf) = sink_buf(art, sink) {
        buf.push_str(text);
    }
}

fn handle_attrs(e: &BytesStart<'_>, art: &mut Article) {
    match e.local_name().as_ref() {
        "pubdata" => {
            if let Some(v) = attr(e, "date.publication") {
                if v.len() >= 8 {
                    art.date = NaiveDate::parse_from_str(&v[..8], "%Y%m%d").ok();
                }
            }
        }
        "doc-id" => {
            if let Some(v) = attr(e, "id-string") {
                art.doc_id = Some(v);
            }
        }
        "meta" => {
            let (Some(name), Some(content)) = (attr(e, "name"), attr(e, "content")) else {
                return;
            };
            match name.as_str() {
                "publication_year" => art.year = content.parse().ok(),
                "publication_month" => art.month = content.parse().ok(),
                "publication_day_of_month" => art.day = content.parse().ok(),
                _ => {}
            }
        }
        _ => {}
    }
}

/// Lazily parses every XML file of a news manifest.
pub struct NewsArticles {
    manifest: CorpusManifest,
    normalizer: Normalizer,
    files: std::vec::IntoIter<PathBuf>,
}

impl NewsArticles {
    fn read(&self, path: &Path) -> Result<DocumentRecord> {
        let doc_err = |message: String| Error::Document {
            path: path.to_owned(),
            message,
        };
        let xml = fs::read_to_string(path).map_err(|e| doc_err(e.to_string()))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut rec = parse_news_article(&xml, &stem, &self.manifest.corpus_id, &self.normalizer).map_err(doc_err)?;
        if rec.temporal_key.is_none() {
            warn!("{}: article has no publication date; emitted undated", path.display());
        }
        rec.temporal_key = self.manifest.admit(rec.temporal_key, &path.display().to_string());
        Ok(rec)
    }
}

impl Iterator for NewsArticles {
    type Item = Result<DocumentRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        let path = self.files.next()?;
        Some(self.read(&path))
    }
}

pub fn ingest_news_xml(manifest: &CorpusManifest, normalizer: Normalizer) -> Result<NewsArticles> {
    if manifest.kind != CorpusKind::NewsXml {
        return Err(Error::Unsupported(format!(
            "manifest kind {:?} is not news_xml",
            manifest.kind
        )));
    }
    Ok(NewsArticles {
        manifest: manifest.clone(),
        normalizer,
        files: manifest.files.clone().into_iter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(xml: &str) -> std::result::Result<DocumentRecord, String> {
        parse_news_article(xml, "fallback", "nyt", &Normalizer::default())
    }

    const ARTICLE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<nitf>
  <head>
    <title>Campus Case</title>
    <meta name="publication_year" content="1992"/>
    <meta name="publication_month" content="11"/>
    <meta name="publication_day_of_month" content="15"/>
    <docdata><doc-id id-string="0571234"/></docdata>
    <pubdata date.publication="19921115T000000" ex-ref="x"/>
  </head>
  <body>
    <body.head><hedline><hl1>Jury Weighs Case</hl1></hedline><byline class="print_byline">By Jane Roe</byline></body.head>
    <body.content><block class="full_text"><p>Boys will be boys.</p><p>Tom&amp;Jerry &#65;</p></block></body.content>
  </body>
</nitf>"#;

    #[test]
    fn parses_nitf_article() {
        let rec = parse(ARTICLE).unwrap();
        assert_eq!(rec.doc_id, "0571234");
        assert_eq!(rec.temporal_key, TemporalKey::parse("1992-11-15"));
        assert_eq!(rec.title.as_deref(), Some("Jury Weighs Case"));
        assert_eq!(rec.author.as_deref(), Some("Jane Roe"));
        assert_eq!(
            rec.tokens,
            ["jury", "weighs", "case", "boys", "will", "be", "boys", "tomjerry", "a"]
        );
    }

    #[test]
    fn body_only_is_exact() {
        let xml = r#"<nitf><head><pubdata date.publication="19921115T000000"/></head><body><body.content><p>Boys will be boys.</p></body.content></body></nitf>"#;
        let rec = parse(xml).unwrap();
        assert_eq!(rec.tokens, ["boys", "will", "be", "boys"]);
        assert_eq!(rec.doc_id, "fallback");
    }

    #[test]
    fn headline_only_article() {
        let xml = r#"<nitf><head><pubdata date.publication="19930101T000000"/></head><body><body.head><hedline><hl1>Time Will Tell</hl1></hedline></body.head></body></nitf>"#;
        assert_eq!(parse(xml).unwrap().tokens, ["time", "will", "tell"]);
    }

    #[test]
    fn meta_date_fallback_and_missing_date() {
        let xml = r#"<nitf><head><meta name="publication_year" content="1990"/><meta name="publication_month" content="2"/><meta name="publication_day_of_month" content="3"/></head><body/></nitf>"#;
        assert_eq!(parse(xml).unwrap().temporal_key, TemporalKey::parse("1990-02-03"));
        let undated = parse("<nitf><body><body.content>x</body.content></body></nitf>").unwrap();
        assert_eq!(undated.temporal_key, None);
    }

    #[test]
    fn malformed_xml_is_an_error() {
        assert!(parse("<nitf><body></nitf>").is_err());
        assert!(parse("<nitf><body>").is_err());
        assert!(parse("plain words").is_err());
    }
}
