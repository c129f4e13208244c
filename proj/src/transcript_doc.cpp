#include "minuteman/transcript_doc.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "minuteman/errors.hpp"
#include "minuteman/text.hpp"

namespace minuteman::doc {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void push(Components& out, Component c) {
  if (c.kind == ComponentKind::kInsert ? c.text.empty() : c.count == 0) return;
  if (!out.empty() && out.back().kind == c.kind) {
    auto& last = out.back();
    if (c.kind == ComponentKind::kInsert) {
      if (last.attrs == c.attrs) {
        last.text += c.text;
        return;
      }
    } else {
      if (c.count > std::numeric_limits<std::size_t>::max() - last.count) {
        throw MalformedEditError("component length out of range");
      }
      last.count += c.count;
      return;
    }
  }
  out.push_back(std::move(c));
}

// Walks retain/delete spans piecewise; inserts are consumed whole.
class ComponentCursor {
 public:
  explicit ComponentCursor(const Components& components) : components_(components) {}

  bool done() const { return index_ >= components_.size(); }
  const Component& current() const { return components_[index_]; }
  std::size_t remaining() const { return current().count - offset_; }

  void advance(std::size_t n) {
    if (current().kind == ComponentKind::kInsert) {
      ++index_;
      offset_ = 0;
      return;
    }
    offset_ += n;
    if (offset_ >= current().count) {
      ++index_;
      offset_ = 0;
    }
  }

 private:
  const Components& components_;
  std::size_t index_ = 0;
  std::size_t offset_ = 0;
};

struct OutChar {
  char32_t ch;
  std::size_t origin;  // old line, or kNone for inserted text
  const LineAttrs* stamp;
};

}  // namespace

std::size_t Component::length() const {
  return kind == ComponentKind::kInsert ? text::utf8_length(text) : count;
}

Components normalize(const Components& components) {
  Components out;
  for (const auto& c : components) push(out, c);
  return out;
}

std::size_t input_length(const Components& components) {
  std::size_t n = 0;
  for (const auto& c : components) {
    if (c.kind != ComponentKind::kInsert) n += c.count;
  }
  return n;
}

std::size_t output_length(const Components& components) {
  std::size_t n = 0;
  for (const auto& c : components) {
    if (c.kind != ComponentKind::kDelete) n += c.length();
  }
  return n;
}

Components stamp_user_inserts(const std::vector<Line>& lines, const Components& components) {
  std::vector<std::size_t> starts;
  std::size_t offset = 0;
  for (const auto& line : lines) {
    starts.push_back(offset);
    offset += text::utf8_length(line.text) + 1;
  }
  auto line_at = [&](std::size_t pos) -> std::size_t {
    return static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), pos) -
                                    starts.begin()) - 1;
  };

  Components out;
  std::size_t cursor = 0;
  for (const auto& c : normalize(components)) {
    if (c.kind != ComponentKind::kInsert) {
      cursor += c.count;
      push(out, c);
      continue;
    }
    if (starts.empty()) {
      push(out, Component::insert(c.text));
      continue;
    }
    const auto line = line_at(cursor);
    const auto& attrs = lines[line].attrs;
    auto nl = c.text.find('\n');
    push(out, Component::insert(c.text.substr(0, nl), attrs));
    if (nl == std::string::npos) continue;
    // The first break ends the line typed into, unless it only splits off an
    // empty line above it.
    const bool empty_head = nl == 0 && cursor == starts[line];
    push(out, Component::insert("\n", empty_head ? LineAttrs{} : attrs));
    push(out, Component::insert(c.text.substr(nl + 1)));
  }
  return out;
}

std::pair<Components, Components> transform(const Components& a_in, const Components& b_in) {
  const Components a = normalize(a_in);
  const Components b = normalize(b_in);
  Components a_prime;
  Components b_prime;
  ComponentCursor ia(a);
  ComponentCursor ib(b);

  while (!ia.done() || !ib.done()) {
    if (!ia.done() && ia.current().kind == ComponentKind::kInsert) {
      push(a_prime, ia.current());
      push(b_prime, Component::retain(ia.current().length()));
      ia.advance(0);
      continue;
    }
    if (!ib.done() && ib.current().kind == ComponentKind::kInsert) {
      push(a_prime, Component::retain(ib.current().length()));
      push(b_prime, ib.current());
      ib.advance(0);
      continue;
    }
    if (ia.done() || ib.done()) {
      throw MalformedEditError("concurrent edits span documents of different lengths");
    }
    const auto n = std::min(ia.remaining(), ib.remaining());
    const auto ka = ia.current().kind;
    const auto kb = ib.current().kind;
    if (ka == ComponentKind::kRetain && kb == ComponentKind::kRetain) {
      push(a_prime, Component::retain(n));
      push(b_prime, Component::retain(n));
    } else if (ka == ComponentKind::kDelete && kb == ComponentKind::kRetain) {
      push(a_prime, Component::erase(n));
    } else if (ka == ComponentKind::kRetain && kb == ComponentKind::kDelete) {
      push(b_prime, Component::erase(n));
    }
    // delete/delete: both sides already removed the span.
    ia.advance(n);
    ib.advance(n);
  }
  return {std::move(a_prime), std::move(b_prime)};
}

std::string join_lines(const std::vector<Line>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i].text;
  }
  return out;
}

std::size_t text_length(const std::vector<Line>& lines) {
  if (lines.empty()) return 0;
  std::size_t n = lines.size() - 1;
  for (const auto& line : lines) n += text::utf8_length(line.text);
  return n;
}

ApplyOutcome apply(const std::vector<Line>& lines, const Components& components_in,
                   std::string_view author) {
  const Components components = normalize(components_in);
  const std::size_t old_count = lines.size();

  // Flatten the old document, remembering where each character came from.
  std::vector<OutChar> input;
  for (std::size_t i = 0; i < old_count; ++i) {
    const auto& line = lines[i];
    auto decoded = text::utf8_decode(line.text);
    const bool uniform = line.stamps.size() != decoded.size() + 1;
    for (std::size_t k = 0; k <= decoded.size(); ++k) {
      if (k == decoded.size() && i + 1 == old_count) break;
      const LineAttrs* stamp = uniform ? &line.attrs : &line.stamps[k];
      input.push_back({k < decoded.size() ? decoded[k] : U'\n', i, stamp});
    }
  }
  std::size_t spanned = 0;
  for (const auto& c : components) {
    if (c.kind == ComponentKind::kInsert) continue;
    if (c.count > input.size() - spanned) {
      throw MalformedEditError("edit spans more than the document's " +
                               std::to_string(input.size()) + " characters");
    }
    spanned += c.count;
  }
  if (spanned != input.size()) {
    throw MalformedEditError("edit spans " + std::to_string(spanned) +
                             " characters, document has " + std::to_string(input.size()));
  }

  std::vector<OutChar> out;
  std::size_t cursor = 0;
  for (const auto& c : components) {
    switch (c.kind) {
      case ComponentKind::kRetain:
        out.insert(out.end(), input.begin() + static_cast<std::ptrdiff_t>(cursor),
                   input.begin() + static_cast<std::ptrdiff_t>(cursor + c.count));
        cursor += c.count;
        break;
      case ComponentKind::kDelete:
        cursor += c.count;
        break;
      case ComponentKind::kInsert:
        for (char32_t ch : text::utf8_decode(c.text)) out.push_back({ch, kNone, &c.attrs});
        break;
    }
  }

  ApplyOutcome result;
  std::set<std::uint64_t> used_utt;
  std::set<std::uint64_t> used_summary;
  std::size_t begin = 0;
  while (begin < out.size()) {
    auto end = begin;
    while (end < out.size() && out[end].ch != U'\n') ++end;
    const bool has_break = end < out.size();

    Line line;
    std::u32string content;
    const LineAttrs* chosen = nullptr;
    for (auto p = begin; p < end; ++p) {
      content.push_back(out[p].ch);
      line.stamps.push_back(*out[p].stamp);
      if (!chosen && !out[p].stamp->empty()) chosen = out[p].stamp;
    }
    if (!chosen && has_break && !out[end].stamp->empty()) chosen = out[end].stamp;
    if (chosen) {
      line.attrs = *chosen;
      if (line.attrs.utt_seq && !used_utt.insert(*line.attrs.utt_seq).second) {
        line.attrs.utt_seq.reset();
      }
      if (line.attrs.summary_id && !used_summary.insert(*line.attrs.summary_id).second) {
        line.attrs.summary_id.reset();
      }
    }
    line.stamps.push_back(has_break ? *out[end].stamp : line.attrs);
    if (std::all_of(line.stamps.begin(), line.stamps.end(),
                    [&](const LineAttrs& a) { return a == line.attrs; })) {
      line.stamps.clear();
    }
    line.text = text::utf8_encode(content);

    // Authorship follows the old line the first character came from.
    const auto origin = out[begin].origin;
    line.author = origin != kNone && lines[origin].text == line.text ? lines[origin].author
                                                                      : std::string(author);
    result.lines.push_back(std::move(line));
    begin = end + 1;
    if (has_break && begin == out.size()) {
      Line last;
      last.author = std::string(author);
      result.lines.push_back(std::move(last));
    }
  }

  std::map<std::uint64_t, const Line*> by_utt;
  std::map<std::uint64_t, const Line*> by_summary;
  for (const auto& l : result.lines) {
    if (l.attrs.utt_seq) by_utt[*l.attrs.utt_seq] = &l;
    if (l.attrs.summary_id) by_summary[*l.attrs.summary_id] = &l;
  }
  for (const auto& old : lines) {
    if (old.attrs.empty()) continue;
    const auto& index = old.attrs.utt_seq ? by_utt : by_summary;
    auto it = index.find(old.attrs.utt_seq ? *old.attrs.utt_seq : *old.attrs.summary_id);
    if (it == index.end() || it->second->text != old.text) result.modified.push_back(old.attrs);
  }
  return result;
}

Segment extract_segment(const std::vector<Line>& lines, SegmentRange range) {
  Segment segment;
  std::vector<std::string> parts;
  bool recording = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& seq = lines[i].attrs.utt_seq;
    if (!recording) {
      if (!seq || *seq < range.start_seq) continue;
      if (*seq > range.end_seq) break;
      recording = true;
    } else if (seq && *seq > range.end_seq) {
      break;
    }
    parts.push_back(lines[i].text);
    segment.line_indices.push_back(i);
    if (seq && *seq == range.end_seq) break;
  }
  segment.text = text::join(parts, "\n");
  return segment;
}

std::size_t word_count(std::string_view s) { return text::split_whitespace(s).size(); }

std::string format_utterance_line(std::string_view speaker_label, std::string_view body) {
  std::string line(speaker_label);
  line += ":  ";
  line += body;
  return line;
}

LineDoc::LineDoc(std::string doc_id) : id_(std::move(doc_id)) {}

LineDoc::Applied LineDoc::commit(EditOp op) {
  auto outcome = apply(lines_, op.components, op.author);
  lines_ = std::move(outcome.lines);
  op.doc_id = id_;
  op.base_revision = revision_;
  ++revision_;
  log_.push_back(op);
  return Applied{revision_, std::move(op), std::move(outcome.modified)};
}

LineDoc::Applied LineDoc::apply_edit(const EditOp& op) {
  if (op.base_revision > revision_) {
    throw MalformedEditError("edit based on future revision " +
                             std::to_string(op.base_revision));
  }
  Components components = normalize(op.components);
  for (auto r = op.base_revision; r < revision_; ++r) {
    components = transform(log_[r].components, components).second;
  }
  if (op.author != kSystemAuthor) components = stamp_user_inserts(lines_, components);
  EditOp transformed{id_, revision_, op.author, std::move(components)};
  return commit(std::move(transformed));
}

std::optional<LineDoc::Applied> LineDoc::append_utterance(const asr::Utterance& utterance) {
  if (appended_seqs_.contains(utterance.utt_seq)) return std::nullopt;
  if (!appended_seqs_.empty() && utterance.utt_seq < *appended_seqs_.rbegin()) {
    throw SequencingError("utterance " + std::to_string(utterance.utt_seq) +
                          " arrived after " + std::to_string(*appended_seqs_.rbegin()));
  }
  auto applied = append_line(format_utterance_line(utterance.speaker_label, utterance.text),
                             LineAttrs{utterance.utt_seq, std::nullopt}, kSystemAuthor);
  appended_seqs_.insert(utterance.utt_seq);
  return applied;
}

LineDoc::Applied LineDoc::append_line(std::string line_text, LineAttrs attrs,
                                      std::string_view author) {
  Components components;
  if (lines_.empty()) {
    components.push_back(Component::insert(std::move(line_text), attrs));
  } else {
    // The new break ends the current last line and carries its stamp.
    components.push_back(Component::retain(length()));
    components.push_back(Component::insert("\n", lines_.back().attrs));
    components.push_back(Component::insert(std::move(line_text), attrs));
  }
  return commit(EditOp{id_, revision_, std::string(author), std::move(components)});
}

LineDoc::Applied LineDoc::replace_line_text(std::size_t line_index, std::string_view new_text,
                                            std::string_view author) {
  if (line_index >= lines_.size()) throw NotFoundError("no such line");
  const auto offset = line_offset(line_index);
  const auto old_len = text::utf8_length(lines_[line_index].text);
  const auto total = length();
  Components components{Component::retain(offset), Component::erase(old_len),
                        Component::insert(std::string(new_text), lines_[line_index].attrs),
                        Component::retain(total - offset - old_len)};
  return commit(EditOp{id_, revision_, std::string(author), normalize(components)});
}

std::optional<std::size_t> LineDoc::find_utterance(std::uint64_t utt_seq) const {
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (lines_[i].attrs.utt_seq == utt_seq) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> LineDoc::find_summary(std::uint64_t summary_id) const {
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (lines_[i].attrs.summary_id == summary_id) return i;
  }
  return std::nullopt;
}

std::vector<EditOp> LineDoc::edits_since(std::uint64_t revision) const {
  if (revision >= revision_) return {};
  return {log_.begin() + static_cast<std::ptrdiff_t>(revision), log_.end()};
}

std::size_t LineDoc::line_offset(std::size_t line_index) const {
  std::size_t offset = 0;
  for (std::size_t i = 0; i < line_index && i < lines_.size(); ++i) {
    offset += text::utf8_length(lines_[i].text) + 1;
  }
  return offset;
}

}  // namespace minuteman::doc
