#include "steerbench/vocabulary.hpp"

#include <fstream>
#include <sstream>

#include "steerbench/errors.hpp"

namespace steerbench {

namespace {

// Keep in sync with data/meta_vocabulary.tsv; a test compares the two.
const char* const kBuiltinTsv =
    "# Controlled vocabulary for meta-action parsing.\n"
    "# One entry per line: stem<TAB>field<TAB>value\n"
    "# A token matches a stem when the token starts with the stem (longest wins).\n"
    "# Fields: speed, heading, direction, modifier, style, marker.\n"
    "accelerat\tspeed\taccelerate\n"
    "decelerat\tspeed\tdecelerate\n"
    "slow\tspeed\tdecelerate\n"
    "brak\tspeed\tdecelerate\n"
    "maintain\tspeed\tmaintain\n"
    "keep\tspeed\tmaintain\n"
    "stop\tspeed\tstop\n"
    "halt\tspeed\tstop\n"
    "stationary\tspeed\tstationary\n"
    "turn\theading\tturn\n"
    "adjust\theading\tadjust\n"
    "drift\theading\tadjust\n"
    "veer\theading\tadjust\n"
    "swerv\theading\tadjust\n"
    "merg\theading\tlane_change\n"
    "uturn\theading\tu_turn\n"
    "straight\theading\tstraight\n"
    "forward\theading\tstraight\n"
    "lane\tmarker\tlane\n"
    "chang\tmarker\tchange\n"
    "driv\tmarker\tdriving\n"
    "left\tdirection\tleft\n"
    "right\tdirection\tright\n"
    "slight\tmodifier\tslight\n"
    "subtl\tmodifier\tslight\n"
    "small\tmodifier\tslight\n"
    "gentl\tmodifier\tgentle\n"
    "gradual\tmodifier\tgentle\n"
    "rapid\tmodifier\trapid\n"
    "quick\tmodifier\trapid\n"
    "abrupt\tmodifier\tabrupt\n"
    "sudden\tmodifier\tabrupt\n"
    "sharp\tmodifier\tsharp\n"
    "tight\tmodifier\tsharp\n"
    "wide\tmodifier\twide\n"
    "smooth\tmodifier\tsmooth\n"
    "cautious\tstyle\tcautiously\n"
    "careful\tstyle\tcautiously\n"
    "normal\tstyle\tnormally\n"
    "aggressive\tstyle\taggressively\n"
    "assertive\tstyle\tassertively\n";

VocabField field_from_string(const std::string& s, int line_no) {
  if (s == "speed") return VocabField::speed;
  if (s == "heading") return VocabField::heading;
  if (s == "direction") return VocabField::direction;
  if (s == "modifier") return VocabField::modifier;
  if (s == "style") return VocabField::style;
  if (s == "marker") return VocabField::marker;
  std::ostringstream msg;
  msg << "vocabulary line " << line_no << ": unknown field '" << s << "'";
  throw ParseError(msg.str());
}

}  // namespace

const char* Vocabulary::builtin_tsv() { return kBuiltinTsv; }

const Vocabulary& Vocabulary::builtin() {
  static const Vocabulary instance = from_tsv(kBuiltinTsv);
  return instance;
}

Vocabulary Vocabulary::from_tsv(const std::string& tsv) {
  Vocabulary vocab;
  std::istringstream in(tsv);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab1 = line.find('\t');
    std::size_t tab2 = (tab1 == std::string::npos) ? std::string::npos
                                                   : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      std::ostringstream msg;
      msg << "vocabulary line " << line_no << ": expected 3 tab-separated fields";
      throw ParseError(msg.str());
    }
    VocabEntry entry;
    entry.stem = line.substr(0, tab1);
    entry.field = field_from_string(line.substr(tab1 + 1, tab2 - tab1 - 1), line_no);
    entry.value = line.substr(tab2 + 1);
    if (entry.stem.empty() || entry.value.empty()) {
      std::ostringstream msg;
      msg << "vocabulary line " << line_no << ": empty stem or value";
      throw ParseError(msg.str());
    }
    vocab.entries_.push_back(std::move(entry));
  }
  return vocab;
}

Vocabulary Vocabulary::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open vocabulary: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_tsv(buf.str());
}

const VocabEntry* Vocabulary::match(const std::string& token) const {
  const VocabEntry* best = nullptr;
  for (const VocabEntry& e : entries_) {
    if (token.size() < e.stem.size()) continue;
    if (token.compare(0, e.stem.size(), e.stem) != 0) continue;
    if (!best || e.stem.size() > best->stem.size()) best = &e;
  }
  return best;
}

}  // namespace steerbench
