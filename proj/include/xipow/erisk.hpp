#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xipow/algebraic.hpp"
#include "xipow/formula.hpp"
#include "xipow/qe.hpp"

namespace xipow {

enum class Player { Max, Min };

struct GameAction {
  std::string name;
  std::vector<std::pair<std::string, Rat>> dist;
};

struct GameState {
  std::string name;
  Player player = Player::Max;
  std::vector<GameAction> actions;
  Rat reward = 0;
  std::optional<int> target;  // fixed value d_s in {0, 1}
};

struct StochasticGame {
  std::vector<GameState> states;
  std::string initial;
  Rat threshold = 0;

  std::size_t index(const std::string& name) const;  // errors with INVALID_GAME when absent
};

// Errors with INVALID_GAME on a broken invariant.
void validate(const StochasticGame& g);
StochasticGame game_from_json(const nlohmann::json& j);
nlohmann::json game_to_json(const StochasticGame& g);

// Variable holding the value of a state.
Var state_var(const std::string& name);

// Constraint system over xi = (b^-eta)^(1/d), where d is the lcm of the exponent denominators.
struct ConstraintSystem {
  Formula phi;
  Int d = 1;
  std::vector<Var> vars;
};

ConstraintSystem build_constraints(const StochasticGame& g);

// The base b: Euler's number or an algebraic number.
struct RiskBase {
  bool euler = false;
  std::optional<AlgebraicNumber> alpha;

  static RiskBase e() { return {true, std::nullopt}; }
  static RiskBase algebraic(const AlgebraicNumber& a) { return {false, a}; }
};

// Descriptor of b^(-eta/d).
BaseDescriptor risk_base(const RiskBase& b, const AlgebraicNumber& eta, const Int& d);

struct EriskOptions {
  QeEngine engine;
  SignOptions sign;
};

// True when the threshold system is satisfiable. Errors with INVALID_PARAMS for eta <= 0 or b <= 1.
bool erisk_decide(const StochasticGame& g, const RiskBase& b, const AlgebraicNumber& eta,
                  const EriskOptions& opts = {});

}  // namespace xipow
