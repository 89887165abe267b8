"""Density-aware decomposable clustering criterion (NKCV2) and the NK hybrid GA."""

from .dataset import (BalanceLevel, Dataset, DatasetError, GaussianModelConfig, as_partition,
                      generate_gaussian_model, load_csv, load_labels, make_spiral, save_csv,
                      save_labels)
from .density import (DensityProfile, Kernel, cutoff_distance, density_profile, local_densities,
                      nearest_higher_density, pairwise_distances)
from .graph import InteractionGraph, Thresholds, build_interaction_graph, compute_thresholds
from .nkcv2 import EvalContext, alpha, delta_evaluate, evaluate, subfunction, subfunction_values
from .operators import (fix_labels, local_search, merge_partners, mutation_merge, mutation_nk,
                        mutation_split, partition_crossover, recombination_graph, renumber,
                        split_disconnected)
from .ga import GaConfig, RunResult, Stop, random_individual, run, tournament_select
from .baselines import CandidateSet, candidate_grid, dbscan, density_peaks, kmeans, kmeans_objective
from .validation import (Criterion, CriterionScore, Direction, adjusted_rand_index, count_clusters,
                         external_criterion, nkcv2_criterion, select_best, silhouette_criterion,
                         silhouette_width)

__version__ = "0.1.0"
