#include "rmcf/checkpoint.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rmcf/error.hpp"

namespace rmcf {

std::string exact_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw InvalidArgument("number formatting failed");
  return std::string(buf.data(), ptr);
}

namespace {

constexpr const char* kMagic = "rmcf-checkpoint";

double parse_exact(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw FormatError("checkpoint: bad number '" + s + "'");
  return v;
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line(const char* what) {
    std::string s;
    if (!std::getline(in_, s)) throw FormatError(std::string("checkpoint: truncated, expected ") + what);
    ++lineno_;
    return s;
  }

  std::vector<std::string> words(const char* what) {
    std::istringstream ss(line(what));
    std::vector<std::string> out;
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
  }

  // A line `<tag> <value...>` with exactly `count` values.
  std::vector<std::string> tagged(const std::string& tag, std::size_t count) {
    auto w = words(tag.c_str());
    if (w.size() != count + 1 || w[0] != tag)
      throw FormatError("checkpoint: expected '" + tag + "' at line " + std::to_string(lineno_));
    w.erase(w.begin());
    return w;
  }

  std::vector<double> numbers(std::size_t count, char sep, const char* what) {
    const std::string s = line(what);
    std::vector<double> out;
    std::string cell;
    std::istringstream ss(s);
    if (sep == ' ') {
      while (ss >> cell) out.push_back(parse_exact(cell));
    } else {
      while (std::getline(ss, cell, sep)) out.push_back(parse_exact(cell));
    }
    if (out.size() != count)
      throw FormatError(std::string("checkpoint: malformed ") + what + " at line " + std::to_string(lineno_));
    return out;
  }

  int lineno() const { return lineno_; }

 private:
  std::istream& in_;
  int lineno_ = 0;
};

long parse_long(const std::string& s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw FormatError("checkpoint: bad integer '" + s + "'");
  return v;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& cp) {
  const FlowState& s = cp.state;
  s.metric.validate();
  s.curve.validate();
  std::ostringstream os;
  os << kMagic << ' ' << kCheckpointVersion << '\n';
  os << "t " << exact_number(s.t) << '\n';
  os << "step " << s.step << '\n';
  os << "resamples " << s.resamples << '\n';
  os << "metric " << s.metric.n << ' ' << s.metric.cells() << '\n';
  for (std::size_t j = 0; j < s.metric.b.size(); ++j)
    os << exact_number(s.metric.b[j]) << ' ' << exact_number(s.metric.phi[j]) << '\n';
  os << "curve " << s.curve.segments() << ' ' << to_string(s.curve.topology) << ' ' << s.curve.orientation << '\n';
  for (std::size_t k = 0; k < s.curve.x.size(); ++k)
    os << exact_number(s.curve.x[k]) << ' ' << exact_number(s.curve.alpha[k]) << '\n';
  const std::size_t first = cp.tail.size() > kCheckpointTail ? cp.tail.size() - kCheckpointTail : 0;
  os << "monitors " << cp.tail.size() - first << '\n';
  for (std::size_t i = first; i < cp.tail.size(); ++i) {
    const CoupledMonitor& m = cp.tail[i];
    const std::array<double, 11> v{m.t,         m.Hmax,      m.Hmin,         m.maxA2,        m.maxTraceless, m.maxP,
                                   m.maxFsigma, m.maxGradH2, m.minSectional, m.maxE_ambient, m.rbar};
    for (std::size_t c = 0; c < v.size(); ++c) os << (c ? "," : "") << exact_number(v[c]);
    os << '\n';
  }
  os << "end\n";
  out << os.str();
}

Checkpoint load_checkpoint(std::istream& in) {
  Reader r(in);
  const auto head = r.words("header");
  if (head.size() != 2 || head[0] != kMagic) throw FormatError("checkpoint: not an rmcf checkpoint (bad header)");
  const long version = parse_long(head[1]);
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint: version " + head[1] + " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");

  Checkpoint cp;
  FlowState& s = cp.state;
  s.t = parse_exact(r.tagged("t", 1)[0]);
  s.step = parse_long(r.tagged("step", 1)[0]);
  s.resamples = parse_long(r.tagged("resamples", 1)[0]);

  const auto mh = r.tagged("metric", 2);
  s.metric.n = static_cast<int>(parse_long(mh[0]));
  const long cells = parse_long(mh[1]);
  if (cells < kMinCells || cells > 10'000'000) throw FormatError("checkpoint: bad metric size");
  for (long j = 0; j <= cells; ++j) {
    const auto v = r.numbers(2, ' ', "metric node");
    s.metric.b.push_back(v[0]);
    s.metric.phi.push_back(v[1]);
  }

  const auto ch = r.tagged("curve", 3);
  const long segments = parse_long(ch[0]);
  if (segments < 2 || segments > 10'000'000) throw FormatError("checkpoint: bad curve size");
  s.curve.topology = topology_from_string(ch[1]);
  s.curve.orientation = static_cast<int>(parse_long(ch[2]));
  for (long k = 0; k <= segments; ++k) {
    const auto v = r.numbers(2, ' ', "curve node");
    s.curve.x.push_back(v[0]);
    s.curve.alpha.push_back(v[1]);
  }

  const long count = parse_long(r.tagged("monitors", 1)[0]);
  if (count < 0 || static_cast<std::size_t>(count) > kCheckpointTail) throw FormatError("checkpoint: bad monitor count");
  for (long i = 0; i < count; ++i) {
    const auto v = r.numbers(11, ',', "monitor row");
    cp.tail.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]});
  }
  if (r.words("end") != std::vector<std::string>{"end"}) throw FormatError("checkpoint: missing 'end'");

  try {
    s.metric.validate();
    s.curve.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("checkpoint: invalid state: ") + e.what());
  }
  return cp;
}

void save_checkpoint_file(const std::string& path, const Checkpoint& cp) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write checkpoint '" + path + "'");
  save_checkpoint(out, cp);
  if (!out) throw FormatError("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

}  // namespace rmcf
