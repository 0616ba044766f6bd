#pragma once

// Internal string helpers shared by the parsers.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace casetl::detail {

inline bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
         c == '\v';
}

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string ToLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

inline bool IEquals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && ToLower(a) == ToLower(b);
}

inline bool IStartsWith(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && IEquals(s.substr(0, prefix.size()), prefix);
}

// Splits on '\n'; a trailing newline does not produce an extra empty line.
inline std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

// One reply line after reasoning-block removal. `hidden` lines were entirely
// inside a <think>...</think> block.
struct ReplyLine {
  std::size_t number = 0;  // 1-based
  std::string text;
  bool hidden = false;
};

// Splits a model reply into lines and blanks out <think>...</think> spans
// (reasoning models emit these before the answer). A closing tag without an
// opening one hides everything before it.
inline std::vector<ReplyLine> SplitReply(std::string_view reply) {
  constexpr std::string_view kOpen = "<think>";
  constexpr std::string_view kClose = "</think>";
  bool in_think = reply.find(kOpen) == std::string_view::npos &&
                  reply.find(kClose) != std::string_view::npos;

  std::vector<ReplyLine> out;
  std::size_t number = 0;
  for (std::string_view raw : SplitLines(reply)) {
    ++number;
    std::string kept;
    bool touched_think = in_think;
    std::string_view rest = raw;
    while (!rest.empty()) {
      if (in_think) {
        std::size_t close = rest.find(kClose);
        if (close == std::string_view::npos) {
          rest = {};
        } else {
          rest.remove_prefix(close + kClose.size());
          in_think = false;
        }
      } else {
        std::size_t open = rest.find(kOpen);
        if (open == std::string_view::npos) {
          kept.append(rest);
          rest = {};
        } else {
          kept.append(rest.substr(0, open));
          rest.remove_prefix(open + kOpen.size());
          in_think = true;
          touched_think = true;
        }
      }
    }
    bool hidden = touched_think && Trim(kept).empty();
    out.push_back({number, std::move(kept), hidden});
  }
  return out;
}

inline bool IsFence(std::string_view trimmed) {
  return trimmed.starts_with("```") || trimmed.starts_with("~~~");
}

// Markdown table rule such as "|---|:---:|" or "--- | ---".
inline bool IsTableRule(std::string_view trimmed) {
  if (trimmed.find('-') == std::string_view::npos) return false;
  return std::all_of(trimmed.begin(), trimmed.end(), [](char c) {
    return c == '-' || c == ':' || c == '|' || c == ' ' || c == '\t' ||
           c == '+' || c == '=';
  });
}

// Removes one pair of enclosing pipes from a markdown table row.
inline std::string_view StripOuterPipes(std::string_view trimmed) {
  if (trimmed.size() >= 2 && trimmed.front() == '|' && trimmed.back() == '|') {
    return Trim(trimmed.substr(1, trimmed.size() - 2));
  }
  return trimmed;
}

inline std::vector<std::string_view> SplitCells(std::string_view row) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = row.find('|', start);
    if (bar == std::string_view::npos) {
      cells.push_back(Trim(row.substr(start)));
      break;
    }
    cells.push_back(Trim(row.substr(start, bar - start)));
    start = bar + 1;
  }
  return cells;
}

}  // namespace casetl::detail
