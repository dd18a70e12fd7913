#include "ia/instances.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ia/errors.hpp"
#include "ia/rng.hpp"

namespace ia {

namespace {

using nlohmann::json;

std::vector<std::string> default_names(const char* stem, int count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (int i = 0; i < count; ++i) names.push_back(stem + std::to_string(i));
  return names;
}

Table table_from_json(const json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  Table t(rows, cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ConfigError(std::string(what) + ": row " + std::to_string(r) + " needs " +
                        std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) t(r, c) = row[c].get<double>();
  }
  return t;
}

json table_to_json(const Table& t) {
  json rows = json::array();
  for (int r = 0; r < t.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < t.cols(); ++c) row.push_back(t(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

GameInstance gen_random_instance(std::uint64_t seed, int num_senders, int num_states,
                                 int num_signals, int num_actions) {
  std::mt19937_64 rng(mix_seed(seed, 0xA11CE));
  GameInstance g;
  g.num_senders = num_senders;
  g.states = default_names("theta", num_states);
  g.signals = default_names("s", num_signals);
  g.actions = default_names("a", num_actions);

  g.prior.resize(num_states);
  simplex_draw(rng, g.prior);
  g.signaling = Table(num_states, num_signals, 0.0);
  for (int t = 0; t < num_states; ++t) {
    std::span<double> row(g.signaling.data().data() + static_cast<std::size_t>(t) * num_signals,
                          static_cast<std::size_t>(num_signals));
    simplex_draw(rng, row);
  }
  g.u_receiver = Table(num_actions, num_states, 0.0);
  g.u_sender = Table(num_actions, num_states, 0.0);
  for (int a = 0; a < num_actions; ++a)
    for (int t = 0; t < num_states; ++t) {
      g.u_receiver(a, t) = uniform01(rng);
      g.u_sender(a, t) = uniform01(rng);
    }
  return validate_instance(std::move(g));
}

GameInstance gen_fixture_instance(const std::string& name, double eps) {
  GameInstance g;
  g.num_senders = 1;

  if (name == "thimp-X" || name == "thimp-Y") {
    if (!(eps > 0.0 && 4.0 * eps <= 1.0))
      throw EpsOutOfRange("thimp fixtures need 0 < eps <= 1/4");
    const double mix = (name == "thimp-X") ? 4.0 * eps : 2.0 * eps;
    g.states = {"theta1", "theta2"};
    g.signals = {"s1", "s2"};
    g.actions = {"a", "b"};
    g.prior = {0.5, 0.5};
    g.signaling = Table(2, 2, 0.0);
    g.signaling(0, 0) = 1.0 - mix;  // state 1 mostly shows s1
    g.signaling(0, 1) = mix;
    g.signaling(1, 0) = 0.0;
    g.signaling(1, 1) = 1.0;
    g.u_receiver = Table(2, 2, 0.0);
    g.u_receiver(0, 0) = 1.0;  // action a pays in state 1
    g.u_receiver(1, 1) = 1.0;  // action b pays in state 2
    g.u_sender = Table(2, 2, 0.0);
    g.u_sender(0, 0) = 1.0;
    g.u_sender(1, 1) = 2.0 * eps;  // the sender barely likes b
    return validate_instance(std::move(g));
  }

  if (name == "lb-X" || name == "lb-Y") {
    if (!(eps > 0.0 && eps < 1.0 / 3.0))
      throw EpsOutOfRange("lb fixtures need 0 < eps < 1/3");
    const double tilt = (name == "lb-X") ? -eps : eps;
    g.states = {"theta1", "theta2", "theta3"};
    g.signals = {"s1", "s2", "s3"};
    g.actions = {"a", "b"};
    g.prior = {1.0 / 3.0 + tilt, 1.0 / 3.0 - tilt, 1.0 / 3.0};
    g.signaling = Table(3, 3, 0.0);
    g.signaling(0, 0) = 0.5;
    g.signaling(0, 1) = 0.5;
    g.signaling(1, 0) = 0.5;
    g.signaling(1, 1) = 0.5;
    g.signaling(2, 2) = 1.0;  // third state reveals itself
    g.u_receiver = Table(2, 3, 0.0);
    g.u_receiver(0, 0) = 1.0;
    g.u_receiver(0, 1) = 1.0;
    g.u_receiver(1, 2) = 1.0;
    g.u_sender = Table(2, 3, 0.0);
    g.u_sender(0, 0) = 0.5;
    g.u_sender(0, 1) = 0.5;
    g.u_sender(1, 2) = 1.0;
    return validate_instance(std::move(g));
  }

  throw UnknownFixture("no fixture named '" + name + "'");
}

std::string instance_to_json(const GameInstance& g) {
  json j;
  j["n"] = g.num_senders;
  j["states"] = g.states;
  j["signals"] = g.signals;
  j["actions"] = g.actions;
  j["prior"] = g.prior;
  j["signaling"] = table_to_json(g.signaling);
  j["u_receiver"] = table_to_json(g.u_receiver);
  j["u_sender"] = table_to_json(g.u_sender);
  return j.dump(2);
}

GameInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("instance JSON parse failure: ") + e.what());
  }
  try {
    GameInstance g;
    g.num_senders = j.at("n").get<int>();
    g.states = j.at("states").get<std::vector<std::string>>();
    g.signals = j.at("signals").get<std::vector<std::string>>();
    g.actions = j.at("actions").get<std::vector<std::string>>();
    g.prior = j.at("prior").get<std::vector<double>>();
    const int T = static_cast<int>(g.states.size());
    const int S = static_cast<int>(g.signals.size());
    const int A = static_cast<int>(g.actions.size());
    g.signaling = table_from_json(j.at("signaling"), T, S, "signaling");
    g.u_receiver = table_from_json(j.at("u_receiver"), A, T, "u_receiver");
    g.u_sender = table_from_json(j.at("u_sender"), A, T, "u_sender");
    return validate_instance(std::move(g));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("instance JSON missing field: ") + e.what());
  }
}

GameInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open instance file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void save_instance(const GameInstance& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write instance file " + path);
  out << instance_to_json(g) << "\n";
}

}  // namespace ia
