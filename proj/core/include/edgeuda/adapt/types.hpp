#pragma once

namespace edgeuda::adapt {

struct OptimSpec {
  // Generator: SGD with momentum and polynomial decay.
  double gen_lr = 2.5e-4;
  double gen_momentum = 0.9;
  double poly_power = 0.9;
  // Discriminator: Adam.
  double disc_lr = 1e-4;
  double disc_beta1 = 0.9;
  double disc_beta2 = 0.99;
  double disc_eps = 1e-8;

  void validate() const;
};

// Generator objective: seg*L_seg(sem) + ref*L_seg(ref) + dep*L_dep + edge*L_bce + adv*L_adv.
struct LossWeights {
  double seg = 1.0;
  double ref = 1.0;
  double dep = 1.0;
  double edge = 1.0;
  double adv = 0.001;

  void validate() const;
};

struct SelfTrainConfig {
  double lambda_conf = 0.8;
  int rounds = 1;
  int epochs_per_round = 1;

  void validate() const;
};

}  // namespace edgeuda::adapt
