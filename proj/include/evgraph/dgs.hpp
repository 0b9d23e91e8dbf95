#pragma once

// Line-oriented text format for event streams.
//
//   DGS004
//   <name> 0 0
//   st <time>
//   an <id> [key=value ...]
//   dn <id>
//   ae <id> <src> <dst> [<|>] [key=value ...]
//   de <id>
//   cn <id> key=value ...        (key= with no value removes the attribute)
//   ce <id> key=value ...
//   cg key=value ...
//
// Values: numbers, true/false, "strings" with \" and \\ escapes, and {a,b,...}
// lists. '#' starts a comment. Blank lines are ignored.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <deque>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "evgraph/event.hpp"

namespace evgraph {

inline constexpr std::string_view kDgsMagic = "DGS004";

class ParseError : public StreamError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : StreamError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                    message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DgsWriteError : public StreamError {
 public:
  using StreamError::StreamError;
};

struct DgsDocument {
  std::string name;
  EventList events;
  friend bool operator==(const DgsDocument&, const DgsDocument&) = default;
};

namespace detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\v' || c == '\f' || c == '\r' || c == '\n';
}

inline bool is_ident_char(char c) { return !is_space(c) && c != '"' && c != '#' && c != '='; }

// Cursor over one line of input. Columns are 1-based byte offsets.
class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& msg) const {
    throw ParseError(line_, pos + 1, msg);
  }

  void skip_spaces() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  // True when only whitespace or a comment remains.
  bool at_end() {
    skip_spaces();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  bool at_delimiter() const {
    return pos_ >= s_.size() || is_space(s_[pos_]) || s_[pos_] == '#';
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  std::size_t pos() const { return pos_; }

  std::string_view identifier(std::string_view what) {
    skip_spaces();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
    if (pos_ == start) {
      if (pos_ >= s_.size() || s_[pos_] == '#') fail("missing " + std::string(what));
      fail("malformed " + std::string(what));
    }
    if (!at_delimiter()) fail("malformed " + std::string(what));
    return s_.substr(start, pos_ - start);
  }

  // Optional standalone `<` or `>` token.
  char direction() {
    skip_spaces();
    if (pos_ < s_.size() && (s_[pos_] == '<' || s_[pos_] == '>')) {
      const std::size_t save = pos_;
      ++pos_;
      if (at_delimiter()) return s_[save];
      pos_ = save;
    }
    return '\0';
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !is_space(s_[pos_]) && s_[pos_] != ',' && s_[pos_] != '}' &&
           s_[pos_] != '#')
      ++pos_;
    std::string_view tok = s_.substr(start, pos_ - start);
    if (tok.empty()) fail_at(start, "malformed attribute: missing value");
    return parse_number(tok, start);
  }

  double parse_number(std::string_view tok, std::size_t at) const {
    std::string_view body = tok;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) body.remove_prefix(1);
    if (is_non_finite_word(body)) fail_at(at, "non-finite number '" + std::string(tok) + "'");
    if (!is_decimal(body)) fail_at(at, "malformed number '" + std::string(tok) + "'");
    // from_chars rejects a leading '+'.
    std::string_view digits = (tok[0] == '+') ? tok.substr(1) : tok;
    double value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec == std::errc::result_out_of_range) {
      // Underflow is representable as a (sub)normal or zero; overflow is not.
      if (has_large_exponent(body)) fail_at(at, "non-finite number '" + std::string(tok) + "'");
      value = 0.0;
    } else if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      fail_at(at, "malformed number '" + std::string(tok) + "'");
    }
    if (!std::isfinite(value)) fail_at(at, "non-finite number '" + std::string(tok) + "'");
    return value;
  }

  AttrValue value() {
    const char c = peek();
    if (c == '"') return string_value();
    if (c == '{') return list_value();
    if (c == 't' || c == 'f') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string_view word = s_.substr(start, pos_ - start);
      if (word == "true") return AttrValue(true);
      if (word == "false") return AttrValue(false);
      fail_at(start, "malformed attribute value '" + std::string(word) + "'");
    }
    return AttrValue(number());
  }

  // key=value, or key= (removal) when `allow_removal`.
  std::pair<std::string, std::optional<AttrValue>> attribute(bool allow_removal) {
    skip_spaces();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
    if (pos_ == start || peek() != '=') fail_at(start, "malformed attribute: expected key=value");
    std::string key(s_.substr(start, pos_ - start));
    ++pos_;  // '='
    if (at_delimiter()) {
      if (!allow_removal) fail_at(start, "malformed attribute: missing value for '" + key + "'");
      return {std::move(key), std::nullopt};
    }
    AttrValue v = value();
    if (!at_delimiter()) fail("malformed attribute: unexpected character after value");
    return {std::move(key), std::move(v)};
  }

 private:
  static bool is_non_finite_word(std::string_view w) {
    std::string lower;
    for (char c : w) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lower == "inf" || lower == "infinity" || lower == "nan";
  }

  // digits [. digits] [e [sign] digits], with at least one mantissa digit.
  static bool is_decimal(std::string_view t) {
    std::size_t i = 0, mantissa = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i, ++mantissa;
    if (i < t.size() && t[i] == '.') {
      ++i;
      while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i, ++mantissa;
    }
    if (mantissa == 0) return false;
    if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
      ++i;
      if (i < t.size() && (t[i] == '+' || t[i] == '-')) ++i;
      std::size_t exp_digits = 0;
      while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i, ++exp_digits;
      if (exp_digits == 0) return false;
    }
    return i == t.size();
  }

  static bool has_large_exponent(std::string_view t) {
    auto e = t.find_first_of("eE");
    if (e == std::string_view::npos) return true;  // huge mantissa
    return e + 1 < t.size() && t[e + 1] != '-';
  }

  AttrValue string_value() {
    const std::size_t start = pos_;
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail_at(start, "malformed attribute: unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= s_.size()) fail_at(start, "malformed attribute: unterminated string");
        const char esc = s_[pos_++];
        if (esc != '"' && esc != '\\') fail_at(pos_ - 2, "malformed attribute: invalid escape");
        out += esc;
      } else {
        out += c;
      }
    }
    return AttrValue(std::move(out));
  }

  AttrValue list_value() {
    const std::size_t start = pos_;
    ++pos_;  // '{'
    AttrValue::List items;
    skip_spaces();
    if (peek() == '}') {
      ++pos_;
      return AttrValue(std::move(items));
    }
    while (true) {
      skip_spaces();
      if (pos_ >= s_.size()) fail_at(start, "malformed attribute: unterminated list");
      items.push_back(value());
      skip_spaces();
      const char c = peek();
      ++pos_;
      if (c == '}') break;
      if (c != ',') fail_at(pos_ - 1, "malformed attribute: expected ',' or '}' in list");
    }
    return AttrValue(std::move(items));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace detail

/// Streaming reader. Holds one line and the events it produced at a time.
class DgsReader : public Source {
 public:
  explicit DgsReader(std::istream& in) : in_(in) {}

  const std::string& name() {
    read_header();
    return name_;
  }

  std::optional<Event> next() {
    read_header();
    while (pending_.empty()) {
      if (!next_line()) return std::nullopt;
      parse_line();
    }
    Event e = std::move(pending_.front());
    pending_.pop_front();
    return e;
  }

  void run(Sink& out) override {
    while (auto e = next()) out.consume(*e);
  }

  /// Line number of the most recently read line (1-based).
  std::size_t line() const { return line_no_; }

 private:
  bool next_line() {
    if (!std::getline(in_, line_)) return false;
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return true;
  }

  void read_header() {
    if (header_done_) return;
    header_done_ = true;
    if (!next_line() || line_ != kDgsMagic) throw ParseError(1, 1, "bad magic line, expected DGS004");
    if (!next_line()) throw ParseError(2, 1, "missing header line '<name> <int> <int>'");
    detail::LineCursor cur(line_, line_no_);
    name_ = std::string(cur.identifier("graph name"));
    for (int i = 0; i < 2; ++i) {
      cur.skip_spaces();
      const std::size_t start = cur.pos();
      std::string_view tok = cur.identifier("header count");
      for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c))) cur.fail_at(start, "malformed header count");
    }
    if (!cur.at_end()) cur.fail("unexpected text after header");
  }

  void parse_line() {
    detail::LineCursor cur(line_, line_no_);
    if (cur.at_end()) return;
    const std::size_t kw_pos = cur.pos();
    const std::string_view kw = cur.identifier("keyword");

    if (kw == "st") {
      cur.skip_spaces();
      if (cur.at_end()) cur.fail("missing step time");
      const std::size_t at = cur.pos();
      const double t = cur.number();
      if (t < 0) cur.fail_at(at, "step time must be non-negative");
      pending_.emplace_back(StepBegins{t});
    } else if (kw == "an") {
      NodeAdded ev{std::string(cur.identifier("node identifier")), {}};
      read_attrs(cur, ev.attrs);
      pending_.emplace_back(std::move(ev));
    } else if (kw == "dn") {
      pending_.emplace_back(NodeRemoved{std::string(cur.identifier("node identifier"))});
    } else if (kw == "ae") {
      EdgeAdded ev;
      ev.id = cur.identifier("edge identifier");
      ev.src = cur.identifier("source identifier");
      ev.dst = cur.identifier("target identifier");
      const char dir = cur.direction();
      if (dir != '\0') ev.directed = true;
      if (dir == '<') std::swap(ev.src, ev.dst);
      read_attrs(cur, ev.attrs);
      pending_.emplace_back(std::move(ev));
    } else if (kw == "de") {
      pending_.emplace_back(EdgeRemoved{std::string(cur.identifier("edge identifier"))});
    } else if (kw == "cn" || kw == "ce") {
      const bool node = kw == "cn";
      std::string id(cur.identifier(node ? "node identifier" : "edge identifier"));
      read_changes(cur, [&](std::string key, std::optional<AttrValue> v) {
        if (node)
          pending_.emplace_back(NodeAttrChanged{id, std::move(key), std::move(v)});
        else
          pending_.emplace_back(EdgeAttrChanged{id, std::move(key), std::move(v)});
      });
    } else if (kw == "cg") {
      read_changes(cur, [&](std::string key, std::optional<AttrValue> v) {
        pending_.emplace_back(GraphAttrChanged{std::move(key), std::move(v)});
      });
    } else {
      cur.fail_at(kw_pos, "unknown keyword '" + std::string(kw) + "'");
    }
    if (!cur.at_end()) cur.fail("unexpected text");
  }

  static void read_attrs(detail::LineCursor& cur, Attrs& attrs) {
    while (!cur.at_end()) {
      auto [key, value] = cur.attribute(false);
      attrs.insert_or_assign(std::move(key), std::move(*value));
    }
  }

  template <class Fn>
  static void read_changes(detail::LineCursor& cur, Fn&& fn) {
    if (cur.at_end()) cur.fail("malformed attribute: expected at least one key=value");
    while (!cur.at_end()) {
      auto [key, value] = cur.attribute(true);
      fn(std::move(key), std::move(value));
    }
  }

  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
  bool header_done_ = false;
  std::string name_;
  std::deque<Event> pending_;
};

inline DgsDocument read_dgs_document(std::istream& in) {
  DgsReader reader(in);
  DgsDocument doc;
  doc.name = reader.name();
  while (auto e = reader.next()) doc.events.push_back(std::move(*e));
  return doc;
}

inline EventList read_dgs(std::istream& in) { return read_dgs_document(in).events; }

inline EventList parse_dgs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_dgs(in);
}

// ---------------------------------------------------------------------------
// Writer

namespace detail {

inline void write_value(std::ostream& out, const AttrValue& v) {
  std::visit(overloaded{
                 [&](double d) {
                   if (!std::isfinite(d)) throw DgsWriteError("non-finite number cannot be written");
                   out << format_number(d);
                 },
                 [&](bool b) { out << (b ? "true" : "false"); },
                 [&](const std::string& s) {
                   out << '"';
                   for (char c : s) {
                     if (c == '\n' || c == '\r')
                       throw DgsWriteError("string attribute contains a line break");
                     if (c == '"' || c == '\\') out << '\\';
                     out << c;
                   }
                   out << '"';
                 },
                 [&](const AttrValue::List& l) {
                   out << '{';
                   for (std::size_t i = 0; i < l.size(); ++i) {
                     if (i) out << ',';
                     write_value(out, l[i]);
                   }
                   out << '}';
                 },
             },
             v.data);
}

inline const std::string& checked_id(const std::string& id) {
  if (!is_valid_identifier(id)) throw DgsWriteError("invalid identifier '" + id + "'");
  return id;
}

inline void write_attr(std::ostream& out, const std::string& key, const std::optional<AttrValue>& v) {
  out << ' ' << checked_id(key) << '=';
  if (v) write_value(out, *v);
}

inline void write_attrs(std::ostream& out, const Attrs& attrs) {
  for (const auto& [k, v] : attrs) write_attr(out, k, v);
}

}  // namespace detail

/// Sink that serializes each event as one line. The header is written on
/// construction. Attribute keys come out in lexicographic order.
class DgsWriter : public Sink {
 public:
  DgsWriter(std::ostream& out, const std::string& name) : out_(out) {
    out_ << kDgsMagic << '\n' << detail::checked_id(name) << " 0 0\n";
  }

  void consume(const Event& e) override {
    // Build the line first so a write error never leaves half a line behind.
    std::ostringstream line;
    write_line(line, e);
    out_ << line.str();
  }

  static void write_line(std::ostream& out, const Event& e) {
    using detail::checked_id;
    std::visit(overloaded{
                   [&](const StepBegins& x) {
                     if (!std::isfinite(x.time) || x.time < 0)
                       throw DgsWriteError("step time must be finite and non-negative");
                     out << "st " << format_number(x.time);
                   },
                   [&](const NodeAdded& x) {
                     out << "an " << checked_id(x.id);
                     detail::write_attrs(out, x.attrs);
                   },
                   [&](const NodeRemoved& x) { out << "dn " << checked_id(x.id); },
                   [&](const EdgeAdded& x) {
                     out << "ae " << checked_id(x.id) << ' ' << checked_id(x.src) << ' '
                         << checked_id(x.dst);
                     if (x.directed) out << " >";
                     detail::write_attrs(out, x.attrs);
                   },
                   [&](const EdgeRemoved& x) { out << "de " << checked_id(x.id); },
                   [&](const NodeAttrChanged& x) {
                     out << "cn " << checked_id(x.id);
                     detail::write_attr(out, x.key, x.value);
                   },
                   [&](const EdgeAttrChanged& x) {
                     out << "ce " << checked_id(x.id);
                     detail::write_attr(out, x.key, x.value);
                   },
                   [&](const GraphAttrChanged& x) {
                     out << "cg";
                     detail::write_attr(out, x.key, x.value);
                   },
               },
               e);
    out << '\n';
  }

 private:
  std::ostream& out_;
};

inline void write_dgs(std::ostream& out, std::span<const Event> events, const std::string& name) {
  DgsWriter w(out, name);
  for (const auto& e : events) w.consume(e);
}

inline std::string write_dgs(std::span<const Event> events, const std::string& name) {
  std::ostringstream out;
  write_dgs(out, events, name);
  return out.str();
}

}  // namespace evgraph
