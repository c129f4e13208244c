#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minuteman/asr_client.hpp"

namespace minuteman::doc {

/// Author id reserved for pipeline-generated edits.
inline constexpr std::string_view kSystemAuthor = "system";

/// Line-level attributes binding a pad line to an utterance or summary point.
struct LineAttrs {
  std::optional<std::uint64_t> utt_seq;
  std::optional<std::uint64_t> summary_id;

  bool empty() const { return !utt_seq && !summary_id; }
  friend bool operator==(const LineAttrs&, const LineAttrs&) = default;
};

struct Line {
  std::string text;
  LineAttrs attrs;
  std::string author{kSystemAuthor};
  /// Attribute stamp of every code point of `text` followed by the one of
  /// the line break ending the line. Empty when all of them equal `attrs`.
  std::vector<LineAttrs> stamps;

  friend bool operator==(const Line&, const Line&) = default;
};

enum class ComponentKind { kRetain, kInsert, kDelete };

/// One step of an edit. Lengths count Unicode code points; lines are
/// separated by a single '\n'.
struct Component {
  ComponentKind kind = ComponentKind::kRetain;
  std::size_t count = 0;  // retain/delete
  std::string text;       // insert
  LineAttrs attrs;        // insert

  static Component retain(std::size_t n) { return {ComponentKind::kRetain, n, {}, {}}; }
  static Component erase(std::size_t n) { return {ComponentKind::kDelete, n, {}, {}}; }
  static Component insert(std::string text, LineAttrs attrs = {}) {
    return {ComponentKind::kInsert, 0, std::move(text), attrs};
  }

  /// Code points covered in the output (insert) or input (retain/delete).
  std::size_t length() const;

  friend bool operator==(const Component&, const Component&) = default;
};

using Components = std::vector<Component>;

struct EditOp {
  std::string doc_id;
  std::uint64_t base_revision = 0;
  std::string author;
  Components components;
};

/// Merges adjacent components of the same kind and drops empty ones.
Components normalize(const Components& components);
/// Length of the document the components apply to (retain + delete).
std::size_t input_length(const Components& components);
std::size_t output_length(const Components& components);

/// Transforms two concurrent edits of the same document. Returns (a', b')
/// with apply(apply(d, a), b') == apply(apply(d, b), a'). When both insert at
/// the same position, the text of `a` ends up first.
std::pair<Components, Components> transform(const Components& a, const Components& b);

/// Replaces the attributes of every insert: text up to and including the
/// insert's first line break takes the attributes of the line it is typed
/// into, the rest none. A break typed at the very start of a line ends a new
/// empty line and gets none. Applied to user edits so typed text belongs to its line and only
/// the system starts attributed lines.
Components stamp_user_inserts(const std::vector<Line>& lines, const Components& components);

/// Plain-text view of a sequence of lines.
std::string join_lines(const std::vector<Line>& lines);
std::size_t text_length(const std::vector<Line>& lines);

/// Result of applying components to a line list.
struct ApplyOutcome {
  std::vector<Line> lines;
  /// Attributes of pre-existing attributed lines that were removed or whose
  /// text changed.
  std::vector<LineAttrs> modified;
};

/// Applies `components` to `lines`.
///
/// Attributes travel with characters: every character keeps the stamp it was
/// created with (its line's attributes, or the insert's). A line takes the
/// stamp of its first stamped character; a line without any falls back to
/// the stamp of the break that ends it, so retyping a whole line keeps its
/// identity while deleting the line together with its break removes it.
/// An utt_seq or summary_id never appears on two lines; the first one wins.
/// Because the result depends only on the surviving stamped characters, both
/// orders of a transformed pair produce the same attributes.
///
/// Throws MalformedEditError if the components do not span the document.
ApplyOutcome apply(const std::vector<Line>& lines, const Components& components,
                   std::string_view author);

/// Utterance sequence range, both ends inclusive.
struct SegmentRange {
  std::uint64_t start_seq = 1;
  std::uint64_t end_seq = 1;
};

struct Segment {
  std::string text;
  std::vector<std::size_t> line_indices;
};

/// Single forward scan: recording starts at the first line whose utt_seq is
/// at least start_seq and stops after the line carrying end_seq, or before a
/// line with a higher utt_seq. Lines without an utt_seq are included while
/// recording.
Segment extract_segment(const std::vector<Line>& lines, SegmentRange range);

/// Number of maximal non-whitespace runs.
std::size_t word_count(std::string_view text);

/// "Label:  text", the transcript line form of an utterance.
std::string format_utterance_line(std::string_view speaker_label, std::string_view text);

/// A revisioned pad. Not thread-safe; callers serialize access per document.
class LineDoc {
 public:
  struct Applied {
    std::uint64_t revision = 0;
    EditOp op;  // as applied, i.e. transformed to the previous revision
    std::vector<LineAttrs> modified;
  };

  explicit LineDoc(std::string doc_id);

  const std::string& id() const { return id_; }
  std::uint64_t revision() const { return revision_; }
  const std::vector<Line>& lines() const { return lines_; }
  std::string text() const { return join_lines(lines_); }
  std::size_t length() const { return text_length(lines_); }

  /// Transforms `op` against every edit applied after its base revision,
  /// then applies it. Inserts by anyone but the system author are
  /// restamped with stamp_user_inserts(). Throws MalformedEditError on a bad base revision or
  /// components that do not span the document at that revision; the
  /// document is unchanged in that case.
  Applied apply_edit(const EditOp& op);

  /// Appends "Label:  text" with the utterance's sequence number attached.
  /// Returns nullopt for a redelivered utt_seq; throws SequencingError for a
  /// sequence number lower than one already appended.
  std::optional<Applied> append_utterance(const asr::Utterance& utterance);

  /// Appends a line at the end of the pad.
  Applied append_line(std::string text, LineAttrs attrs, std::string_view author);

  /// Replaces the text of one line, keeping its attributes.
  Applied replace_line_text(std::size_t line_index, std::string_view text,
                            std::string_view author);

  std::optional<std::size_t> find_utterance(std::uint64_t utt_seq) const;
  std::optional<std::size_t> find_summary(std::uint64_t summary_id) const;

  /// Applied edits with revision > `revision`, in order.
  std::vector<EditOp> edits_since(std::uint64_t revision) const;

  /// Code-point offset of the first character of a line.
  std::size_t line_offset(std::size_t line_index) const;

 private:
  Applied commit(EditOp op);

  std::string id_;
  std::uint64_t revision_ = 0;
  std::vector<Line> lines_;
  std::vector<EditOp> log_;  // log_[r - 1] produced revision r
  std::set<std::uint64_t> appended_seqs_;
};

}  // namespace minuteman::doc
