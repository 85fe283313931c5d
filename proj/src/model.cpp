#include "colme/model.hpp"

#include "colme/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace colme {

bool contains(const AgentSet& set, AgentId id) {
  return std::binary_search(set.begin(), set.end(), id);
}

ProblemInstance::ProblemInstance(std::vector<double> means, double sigma)
    : means_(std::move(means)), sigma_(sigma) {
  if (means_.empty()) throw std::invalid_argument("ProblemInstance: at least one agent is required");
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
    throw std::invalid_argument("ProblemInstance: sigma must be a finite non-negative real");
  }
  for (double m : means_) {
    if (!std::isfinite(m)) throw std::invalid_argument("ProblemInstance: means must be finite");
  }
}

double ProblemInstance::gap(AgentId a, AgentId l) const { return std::abs(mean(a) - mean(l)); }

std::optional<double> ProblemInstance::separation_gap(AgentId a, double eta) const {
  std::optional<double> best;
  for (AgentId l = 0; l < num_agents(); ++l) {
    const double g = gap(a, l);
    if (g > eta && (!best || g < *best)) best = g;
  }
  return best;
}

std::vector<double> ProblemInstance::distinct_means() const {
  std::vector<double> out = means_;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

double parse_real(const std::string& token, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw std::runtime_error("instance file line " + std::to_string(line_no) + ": bad real '" +
                             token + "'");
  }
  return v;
}

}  // namespace

void write_instance(std::ostream& out, const ProblemInstance& inst) {
  out << inst.num_agents() << ' ' << format_real(inst.sigma()) << '\n';
  for (AgentId a = 0; a < inst.num_agents(); ++a) {
    out << a << ' ' << format_real(inst.mean(a)) << '\n';
  }
}

ProblemInstance read_instance(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw std::runtime_error("instance file: missing header line");
  std::istringstream header(line);
  std::size_t num_agents = 0;
  std::string sigma_tok;
  if (!(header >> num_agents >> sigma_tok) || num_agents == 0) {
    throw std::runtime_error("instance file: header must be 'A sigma' with A >= 1");
  }
  const double sigma = parse_real(sigma_tok, line_no);

  std::vector<double> means(num_agents);
  std::vector<bool> seen(num_agents, false);
  for (std::size_t i = 0; i < num_agents; ++i) {
    if (!next_line()) throw std::runtime_error("instance file: expected " + std::to_string(num_agents) + " agent lines");
    std::istringstream row(line);
    std::size_t id = 0;
    std::string mean_tok;
    if (!(row >> id >> mean_tok) || id >= num_agents || seen[id]) {
      throw std::runtime_error("instance file line " + std::to_string(line_no) +
                               ": expected unique 'agent_id mean' with agent_id < A");
    }
    seen[id] = true;
    means[id] = parse_real(mean_tok, line_no);
  }
  if (next_line()) throw std::runtime_error("instance file: trailing content after agent lines");
  return ProblemInstance(std::move(means), sigma);
}

void save_instance(const std::filesystem::path& path, const ProblemInstance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file " + path.string());
  write_instance(out, inst);
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  return read_instance(in);
}

TrueClass true_class(const ProblemInstance& inst, AgentId a, double eta) {
  if (a >= inst.num_agents()) throw std::out_of_range("true_class: agent index out of range");
  TrueClass cls{a, eta, {}};
  for (AgentId l = 0; l < inst.num_agents(); ++l) {
    if (inst.gap(a, l) <= eta) cls.members.push_back(l);
  }
  return cls;
}

double class_mean(const ProblemInstance& inst, const TrueClass& cls) {
  if (cls.members.empty()) throw std::invalid_argument("class_mean: empty class");
  double sum = 0.0;
  for (AgentId l : cls.members) sum += inst.mean(l);
  return sum / static_cast<double>(cls.members.size());
}

AgentMemory::AgentMemory(AgentId owner, std::size_t num_agents)
    : owner_(owner), avgs_(num_agents, 0.0), counts_(num_agents, 0), cursor_(0) {
  if (owner >= num_agents) throw std::out_of_range("AgentMemory: owner out of range");
  cursor_ = (owner + 1) % num_agents;
}

void AgentMemory::set_cursor(AgentId c) {
  if (c >= num_agents()) throw std::out_of_range("AgentMemory: cursor out of range");
  cursor_ = c;
}

void AgentMemory::perceive(std::span<const double> samples) {
  if (samples.empty()) return;
  if (counts_[owner_] == 0) shift_ = samples.front();
  for (double x : samples) local_sum_ += x - shift_;
  counts_[owner_] += samples.size();
  avgs_[owner_] = shift_ + local_sum_ / static_cast<double>(counts_[owner_]);
}

void AgentMemory::set_local(double avg, std::uint64_t count) {
  shift_ = count == 0 ? 0.0 : avg;
  local_sum_ = 0.0;
  avgs_[owner_] = count == 0 ? 0.0 : avg;
  counts_[owner_] = count;
}

void AgentMemory::store(AgentId peer, double avg, std::uint64_t count) {
  if (peer >= num_agents()) throw std::out_of_range("AgentMemory::store: peer out of range");
  if (peer == owner_) throw std::invalid_argument("AgentMemory::store: cannot overwrite the owner's entry");
  avgs_[peer] = count == 0 ? 0.0 : avg;
  counts_[peer] = count;
}

double optimistic_distance(const AgentMemory& mem, AgentId peer, const ConfidenceRadius& radius) {
  const AgentId a = mem.owner();
  if (mem.count(a) == 0 || mem.count(peer) == 0) return -kInfinity;
  return std::abs(mem.avg(a) - mem.avg(peer)) - radius(mem.count(a)) - radius(mem.count(peer));
}

void optimistic_class_into(const AgentMemory& mem, const ConfidenceRadius& radius, double eta,
                           AgentSet& out) {
  out.clear();
  const AgentId a = mem.owner();
  const auto avgs = mem.avgs();
  const auto counts = mem.counts();
  if (counts[a] == 0) {
    for (AgentId l = 0; l < avgs.size(); ++l) out.push_back(l);
    return;
  }
  const double own_avg = avgs[a];
  const double own_radius = radius(counts[a]);
  for (AgentId l = 0; l < avgs.size(); ++l) {
    // count 0 gives an infinite radius, hence distance -inf: always kept.
    const double d = std::abs(own_avg - avgs[l]) - own_radius - radius(counts[l]);
    if (d <= eta || l == a) out.push_back(l);
  }
}

AgentSet optimistic_class(const AgentMemory& mem, const ConfidenceRadius& radius, double eta) {
  AgentSet out;
  out.reserve(mem.num_agents());
  optimistic_class_into(mem, radius, eta, out);
  return out;
}

}  // namespace colme
