//! Frozen reference pairs for the Porter stemmer, generated with an
//! independent reference implementation of the classic algorithm and
//! spot-validated against its published rule examples.

pub const PORTER_PAIRS: &[(&str, &str)] = &[
    ("caresses", "caress"),
    ("ponies", "poni"),
    ("ties", "ti"),
    ("caress", "caress"),
    ("cats", "cat"),
    ("feed", "feed"),
    ("agreed", "agre"),
    ("plastered", "plaster"),
    ("bled", "bled"),
    ("motoring", "motor"),
    ("sing", "sing"),
    ("conflated", "conflat"),
    ("troubled", "troubl"),
    ("sized", "size"),
    ("hopping", "hop"),
    ("tanned", "tan"),
    ("falling", "fall"),
    ("hissing", "hiss"),
    ("fizzed", "fizz"),
    ("failing", "fail"),
    ("filing", "file"),
    ("happy", "happi"),
    ("sky", "sky"),
    ("relational", "relat"),
    ("conditional", "condit"),
    ("rational", "ration"),
    ("digitizer", "digit"),
    ("operator", "oper"),
    ("feudalism", "feudal"),
    ("decisiveness", "decis"),
    ("hopefulness", "hope"),
    ("callousness", "callous"),
    ("formaliti", "formal"),
    ("sensitiviti", "sensit"),
    ("sensibiliti", "sensibl"),
    ("triplicate", "triplic"),
    ("formative", "form"),
    ("formalize", "formal"),
    ("electriciti", "electr"),
    ("electrical", "electr"),
    ("hopeful", "hope"),
    ("goodness", "good"),
    ("revival", "reviv"),
    ("allowance", "allow"),
    ("inference", "infer"),
    ("airliner", "airlin"),
    ("gyroscopic", "gyroscop"),
    ("adjustable", "adjust"),
    ("defensible", "defens"),
    ("irritant", "irrit"),
    ("replacement", "replac"),
    ("adjustment", "adjust"),
    ("dependent", "depend"),
    ("adoption", "adopt"),
    ("communism", "commun"),
    ("activate", "activ"),
    ("angulariti", "angular"),
    ("homologous", "homolog"),
    ("effective", "effect"),
    ("bowdlerize", "bowdler"),
    ("probate", "probat"),
    ("rate", "rate"),
    ("cease", "ceas"),
    ("controll", "control"),
    ("roll", "roll"),
    ("networks", "network"),
    ("network", "network"),
    ("algorithms", "algorithm"),
    ("algorithm", "algorithm"),
    ("computing", "comput"),
    ("computation", "comput"),
    ("computational", "comput"),
    ("neural", "neural"),
    ("learning", "learn"),
    ("learned", "learn"),
    ("generation", "gener"),
    ("generating", "gener"),
    ("generated", "gener"),
    ("generator", "gener"),
    ("keyphrase", "keyphras"),
    ("keyphrases", "keyphras"),
    ("models", "model"),
    ("modeling", "model"),
    ("modelled", "model"),
    ("training", "train"),
    ("trained", "train"),
    ("trainable", "trainabl"),
    ("optimization", "optim"),
    ("optimizer", "optim"),
    ("gradients", "gradient"),
    ("gradient", "gradient"),
    ("descending", "descend"),
    ("descent", "descent"),
    ("embedding", "embed"),
    ("embeddings", "embed"),
    ("attention", "attent"),
    ("attentive", "attent"),
    ("pointers", "pointer"),
    ("pointing", "point"),
    ("selection", "select"),
    ("selected", "select"),
    ("selector", "selector"),
    ("guidance", "guidanc"),
    ("guided", "guid"),
    ("guiding", "guid"),
    ("vocabulary", "vocabulari"),
    ("vocabularies", "vocabulari"),
    ("sequences", "sequenc"),
    ("sequence", "sequenc"),
    ("encoder", "encod"),
    ("encoders", "encod"),
    ("decoding", "decod"),
    ("decoder", "decod"),
    ("hierarchical", "hierarch"),
    ("hierarchy", "hierarchi"),
    ("probability", "probabl"),
    ("probabilities", "probabl"),
    ("distributions", "distribut"),
    ("distribution", "distribut"),
    ("classification", "classif"),
    ("classifier", "classifi"),
    ("extraction", "extract"),
    ("extracted", "extract"),
    ("summarization", "summar"),
    ("summaries", "summari"),
    ("semantic", "semant"),
    ("semantically", "semant"),
    ("syntactic", "syntact"),
    ("analysis", "analysi"),
    ("analyses", "analys"),
    ("information", "inform"),
    ("informative", "inform"),
    ("retrieval", "retriev"),
    ("retrieved", "retriev"),
    ("queries", "queri"),
    ("query", "queri"),
    ("documents", "document"),
    ("document", "document"),
    ("abstracts", "abstract"),
    ("abstract", "abstract"),
    ("titles", "titl"),
    ("title", "titl"),
    ("scientific", "scientif"),
    ("sciences", "scienc"),
    ("engineering", "engin"),
    ("engineered", "engin"),
    ("systems", "system"),
    ("system", "system"),
    ("dynamical", "dynam"),
    ("dynamics", "dynam"),
    ("stochastic", "stochast"),
    ("deterministic", "determinist"),
    ("convergence", "converg"),
    ("converged", "converg"),
    ("iterations", "iter"),
    ("iteration", "iter"),
    ("matrices", "matric"),
    ("matrix", "matrix"),
    ("vectors", "vector"),
    ("vector", "vector"),
    ("tensors", "tensor"),
    ("tensor", "tensor"),
    ("layers", "layer"),
    ("layer", "layer"),
    ("recurrent", "recurr"),
    ("bidirectional", "bidirect"),
    ("directional", "direct"),
    ("forward", "forward"),
    ("backward", "backward"),
    ("propagation", "propag"),
    ("propagated", "propag"),
    ("losses", "loss"),
    ("loss", "loss"),
    ("entropy", "entropi"),
    ("likelihood", "likelihood"),
    ("estimation", "estim"),
    ("estimated", "estim"),
    ("parameters", "paramet"),
    ("parameter", "paramet"),
    ("initialization", "initi"),
    ("initialized", "initi"),
    ("uniformly", "uniformli"),
    ("uniform", "uniform"),
    ("clipping", "clip"),
    ("clipped", "clip"),
    ("normalization", "normal"),
    ("normalized", "normal"),
    ("evaluation", "evalu"),
    ("evaluated", "evalu"),
    ("metrics", "metric"),
    ("metric", "metric"),
    ("precision", "precis"),
    ("recall", "recal"),
    ("measurement", "measur"),
    ("measured", "measur"),
    ("comparisons", "comparison"),
    ("comparison", "comparison"),
    ("experiments", "experi"),
    ("experimental", "experiment"),
    ("results", "result"),
    ("resulting", "result"),
    ("baselines", "baselin"),
    ("baseline", "baselin"),
    ("performance", "perform"),
    ("performing", "perform"),
    ("improvements", "improv"),
    ("improved", "improv"),
    ("significantly", "significantli"),
    ("significant", "signific"),
    ("effectiveness", "effect"),
    ("effectively", "effect"),
    ("proposes", "propos"),
    ("proposed", "propos"),
    ("approaches", "approach"),
    ("approach", "approach"),
    ("mechanisms", "mechan"),
    ("mechanism", "mechan"),
    ("architectures", "architectur"),
    ("architecture", "architectur"),
    ("implementations", "implement"),
    ("implementation", "implement"),
    ("iterating", "iter"),
    ("flying", "fly"),
    ("dying", "dy"),
    ("lying", "ly"),
    ("tying", "ty"),
    ("agreeable", "agreeabl"),
    ("readability", "readabl"),
    ("usability", "usabl"),
    ("scalability", "scalabl"),
    ("reliability", "reliabl"),
    ("availability", "avail"),
    ("responsibilities", "respons"),
    ("conspiracy", "conspiraci"),
    ("ecclesiastical", "ecclesiast"),
    ("oscillators", "oscil"),
];
