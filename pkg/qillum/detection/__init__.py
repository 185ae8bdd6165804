from qillum.detection.campaign import (
    CampaignResult,
    CampaignSpec,
    HierarchyCheck,
    bound_hierarchy_check,
    campaign_from_probe,
    run_campaign,
    threshold,
)
