use std::sync::OnceLock;

use regex::Regex;

fn timing_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^\s*\d{1,2}:\d{2}:\d{2}[,.]\d{1,3}\s*-->\s*\d{1,2}:\d{2}:\d{2}[,.]\d{1,3}")
            .unwrap()
    })
}

fn tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"<[^>]*>").unwrap())
}

fn is_cue_number(line: &str) -> bool {
    let t = line.trim();
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

/// Drops cue numbers, timing lines and `<...>` tags; joins the remaining
/// non-blank lines with single spaces. A digit-only line counts as a cue
/// number only when a timing line follows it.
pub fn strip_subtitle_markup(srt: &str) -> String {
    let srt = srt.strip_prefix('\u{feff}').unwrap_or(srt);
    let lines: Vec<&str> = srt.lines().collect();
    let mut kept = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if timing_re().is_match(line) {
            continue;
        }
        if is_cue_number(line) && lines.get(i + 1).is_some_and(|n| timing_re().is_match(n)) {
            continue;
        }
        let text = tag_re().replace_all(line, "");
        let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
        if !text.is_empty() {
            kept.push(text);
        }
    }
    kept.join(" ")
}
